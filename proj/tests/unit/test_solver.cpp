// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccopf/io.hpp"
#include "ccopf/solver.hpp"

using namespace ccopf;

namespace {

GridCase single_bus_case() {
  GridCase g;
  g.slack_bus = 1;
  g.buses = {{1, 100.0}};
  g.generators = {{1, 0, 200, 1.0, 0, 0, 1, 1, 0.1}};
  g.finalize();
  return g;
}

GridCase study_case() {
  GridCase g = load_case_file(std::string(CCOPF_DATA_DIR) + "/case118_wind.json");
  return apply_case_modifiers(g, 0.25, 1.10);
}

GridCase calib_case() {
  return load_case_file(std::string(CCOPF_DATA_DIR) + "/case2.json");
}

}  // namespace

TEST_CASE("dcopf forced balance on one bus") {
  GridCase g = single_bus_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DispatchSolution s = solve_dcopf(g, ptdf);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.p0[0] == doctest::Approx(100.0).epsilon(1e-8));
  CHECK(s.objective == doctest::Approx(10000.0).epsilon(1e-7));
}

TEST_CASE("dcopf splits equal-cost generators evenly") {
  GridCase g;
  g.slack_bus = 1;
  g.buses = {{1, 0.0}, {2, 120.0}};
  g.generators = {{1, 0, 200, 0.02, 5, 0, 1, 1, 0.1}, {2, 0, 200, 0.02, 5, 0, 1, 1, 0.1}};
  g.lines = {{1, 2, 10.0, 500.0}};
  g.finalize();
  DispatchSolution s = solve_dcopf(g, build_ptdf(g));
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.p0[0] == doctest::Approx(60.0).epsilon(1e-7));
  CHECK(s.p0[1] == doctest::Approx(60.0).epsilon(1e-7));
}

TEST_CASE("dcopf congested triangle against a grid oracle") {
  GridCase g;
  g.slack_bus = 3;
  g.buses = {{1, 0.0}, {2, 0.0}, {3, 90.0}};
  g.generators = {{1, 0, 100, 0.01, 10, 0, 1, 1, 0.1}, {2, 0, 100, 0.01, 30, 0, 1, 1, 0.1}};
  g.lines = {{1, 2, 5.0, 100.0}, {2, 3, 5.0, 100.0}, {1, 3, 5.0, 40.0}};
  g.finalize();
  PtdfMatrix ptdf = build_ptdf(g);
  DispatchSolution s = solve_dcopf(g, ptdf);
  REQUIRE(s.status == SolveStatus::Optimal);

  // One free variable after the balance; brute-force it.
  double best = 1e300, best_p1 = 0;
  for (double p1 = 0.0; p1 <= 90.0; p1 += 1e-3) {
    const double p2 = 90.0 - p1;
    Eigen::VectorXd inj(3);
    inj << p1, p2, -90.0;
    Eigen::VectorXd f = ptdf.entries * inj;
    if (std::abs(f(0)) > 100.0 || std::abs(f(1)) > 100.0 || std::abs(f(2)) > 40.0) continue;
    const double cost = 0.01 * p1 * p1 + 10 * p1 + 0.01 * p2 * p2 + 30 * p2;
    if (cost < best) {
      best = cost;
      best_p1 = p1;
    }
  }
  CHECK(s.objective <= best + 1e-6);
  CHECK(s.p0[0] == doctest::Approx(best_p1).epsilon(1e-2));
}

TEST_CASE("ccopf reduces to dcopf in the deterministic limits") {
  GridCase g = calib_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);
  DispatchSolution base = solve_dcopf(g, ptdf);
  REQUIRE(base.status == SolveStatus::Optimal);

  SUBCASE("zero variance") {
    WindStatistics none = WindStatistics::fluctuations(g);
    none.variances = {0.0};
    DispatchSolution s = solve_ccopf(g, ptdf, droops, none, 0.05);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.p0[0] == doctest::Approx(base.p0[0]).epsilon(1e-6));
    CHECK(s.p0[1] == doctest::Approx(base.p0[1]).epsilon(1e-6));
  }
  SUBCASE("epsilon one half") {
    DispatchSolution s = solve_ccopf(g, ptdf, droops, WindStatistics::fluctuations(g), 0.5);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.p0[0] == doctest::Approx(base.p0[0]).epsilon(1e-6));
    CHECK(s.setpoint_cost == doctest::Approx(base.setpoint_cost).epsilon(1e-8));
    CHECK(s.objective > base.objective);  // variance offset is still charged
  }
}

TEST_CASE("ccopf objective is nondecreasing as epsilon shrinks") {
  GridCase g = calib_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);
  WindStatistics fluct = WindStatistics::fluctuations(g);
  double prev = -1e300;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    DispatchSolution s = solve_ccopf(g, ptdf, droops, fluct, eps);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective >= prev - 1e-9);
    prev = s.objective;
  }
}

TEST_CASE("pfr cutting plane on the calibration case") {
  GridCase g = calib_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);
  WindStatistics fluct = WindStatistics::fluctuations(g);
  const Deadband band{40.0};

  DispatchSolution pfr = solve_ccopf_pfr(g, ptdf, droops, fluct, 0.01, band);
  REQUIRE(pfr.status == SolveStatus::Optimal);
  CHECK(pfr.iterations <= 200);

  SUBCASE("every weighted constraint holds at the returned dispatch") {
    for (const ConstraintValue& cv : pfr.constraint_report)
      CHECK(cv.value <= cv.bound + 1e-6);
  }

  SUBCASE("logged violations shrink monotonically across iterations") {
    REQUIRE(!pfr.violation_trace.empty());
    for (std::size_t i = 1; i < pfr.violation_trace.size(); ++i)
      CHECK(pfr.violation_trace[i] <= pfr.violation_trace[i - 1] + 1e-12);
    CHECK(pfr.violation_trace.back() <= 1e-8);
  }

  SUBCASE("objective ordering against dcopf and ccopf") {
    DispatchSolution dc = solve_dcopf(g, ptdf);
    DispatchSolution cc = solve_ccopf(g, ptdf, droops, fluct, 0.01);
    REQUIRE(dc.status == SolveStatus::Optimal);
    REQUIRE(cc.status == SolveStatus::Optimal);
    const double offset = cc.variance_offset;
    CHECK(dc.setpoint_cost + offset <= cc.objective + 1e-6);
    CHECK(cc.objective <= pfr.objective + 1e-6);
  }

  SUBCASE("retained cuts never exclude weighted-feasible dispatches") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int probes = 0;
    while (probes < 20) {
      const double p1 = 220.0 * u(rng);
      std::vector<double> probe = {p1, 300.0 - p1};
      if (probe[1] < 0.0 || probe[1] > 300.0) continue;
      ++probes;
      // Is the probe weighted-feasible? Evaluate every reported constraint.
      RegimeMoments m0 = sigma_moments(g, ptdf, droops, probe, fluct, 0);
      RegimeMoments m1 = sigma_moments(g, ptdf, droops, probe, fluct, 1);
      bool feasible = true;
      for (const ConstraintValue& cv : pfr.constraint_report) {
        const RegimeMoments& m = cv.spec.regime == 0 ? m0 : m1;
        if (wcc_evaluate(cv.spec, m, band, cv.weight_scale, cv.weight_ref).value >
            cv.bound + 1e-9) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      for (const Cut& cut : pfr.cuts) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < probe.size(); ++i) lhs += cut.coeffs[i] * probe[i];
        CHECK(lhs <= cut.offset + 1e-7);
      }
    }
  }
}

TEST_CASE("pfr deterministic and huge-deadband limits") {
  GridCase g = calib_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);

  SUBCASE("zero variance tracks dcopf within the scale floor") {
    WindStatistics none = WindStatistics::fluctuations(g);
    none.variances = {0.0};
    DispatchSolution pfr = solve_ccopf_pfr(g, ptdf, droops, none, 0.01, Deadband{10.0});
    DispatchSolution dc = solve_dcopf(g, ptdf);
    REQUIRE(pfr.status == SolveStatus::Optimal);
    CHECK(pfr.p0[0] == doctest::Approx(dc.p0[0]).epsilon(1e-3));
  }

  SUBCASE("infinite deadband reduces to the affine secondary-share policy") {
    WindStatistics fluct = WindStatistics::fluctuations(g);
    DispatchSolution wide =
        solve_ccopf_pfr(g, ptdf, droops, fluct, 0.01, Deadband{1e9});
    REQUIRE(wide.status == SolveStatus::Optimal);
    // Every binding value must match the closed-form full-Gaussian weight of
    // the regime-0 (secondary-share) subject distribution.
    RegimeMoments m0 = sigma_moments(g, ptdf, droops, wide.p0, fluct, 0);
    for (const ConstraintValue& cv : wide.constraint_report) {
      if (cv.spec.regime != 0) {
        CHECK(cv.value == doctest::Approx(0.0));  // outside event never happens
        continue;
      }
      const bool gen = is_generator_subject(cv.spec.subject);
      const double mean = gen ? m0.p_mean[cv.spec.index] : m0.flow_mean[cv.spec.index];
      const double var = gen ? m0.p_var[cv.spec.index] : m0.flow_var[cv.spec.index];
      const double closed = exp_weight_gaussian_mean(
          mean, var, cv.weight_scale, is_upper_side(cv.spec.subject), cv.weight_ref);
      CHECK(cv.value == doctest::Approx(closed).epsilon(1e-7));
    }
  }
}

TEST_CASE("pfr against ccopf on the study case at one epsilon") {
  GridCase g = study_case();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);
  WindStatistics fluct = WindStatistics::fluctuations(g);

  DispatchSolution cc = solve_ccopf(g, ptdf, droops, fluct, 1e-2);
  DispatchSolution pfr = solve_ccopf_pfr(g, ptdf, droops, fluct, 1e-2, Deadband{100.0});
  REQUIRE(cc.status == SolveStatus::Optimal);
  REQUIRE(pfr.status == SolveStatus::Optimal);
  CHECK(pfr.objective >= cc.objective);
  CHECK(pfr.iterations <= 200);
  for (const ConstraintValue& cv : pfr.constraint_report)
    CHECK(cv.value <= cv.bound + 1e-6);
  for (std::size_t i = 1; i < pfr.violation_trace.size(); ++i)
    CHECK(pfr.violation_trace[i] <= pfr.violation_trace[i - 1] + 1e-12);
}

TEST_CASE("pfr handles regime-dependent participation") {
  GridCase g = calib_case();
  g.generators[0].alpha1 = 0.8;
  g.generators[0].alpha2 = 0.2;
  g.generators[1].alpha1 = 0.1;
  g.generators[1].alpha2 = 0.9;
  g.finalize();
  PtdfMatrix ptdf = build_ptdf(g);
  DroopSet droops = DroopSet::from_case(g);
  WindStatistics fluct = WindStatistics::fluctuations(g);

  DispatchSolution pfr = solve_ccopf_pfr(g, ptdf, droops, fluct, 0.02, Deadband{30.0});
  REQUIRE(pfr.status == SolveStatus::Optimal);
  for (const ConstraintValue& cv : pfr.constraint_report)
    CHECK(cv.value <= cv.bound + 1e-6);
  // The mixture offset now differs from either single-regime offset.
  const double mixed = policy_variance_offset(g, droops, fluct, Deadband{30.0});
  const double primary_only = policy_variance_offset(g, droops, fluct, Deadband{0.0});
  CHECK(mixed != doctest::Approx(primary_only).epsilon(1e-6));
}

TEST_CASE("policy variance offset matches the affine closed form") {
  GridCase g = calib_case();
  DroopSet droops = DroopSet::from_case(g);
  WindStatistics fluct = WindStatistics::fluctuations(g);
  const auto [mean, var] = aggregate_wind(fluct);
  (void)mean;

  // Zero deadband: always the primary regime.
  const double zero_band = policy_variance_offset(g, droops, fluct, Deadband{0.0});
  const std::vector<double> share = renormalized_droop(droops, 1);
  double expect = 0.0;
  for (std::size_t i = 0; i < g.generators.size(); ++i)
    expect += g.generators[i].cost_quad * share[i] * share[i] * var;
  CHECK(zero_band == doctest::Approx(expect).epsilon(1e-10));

  // Uniform droops: the offset is regime independent.
  CHECK(policy_variance_offset(g, droops, fluct, Deadband{35.0}) ==
        doctest::Approx(expect).epsilon(1e-10));
}
