// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ccopf/policy.hpp"

using namespace ccopf;

namespace {

DroopSet make_droops(std::vector<double> a1, std::vector<double> a2, std::vector<double> g) {
  DroopSet d;
  d.alpha1 = std::move(a1);
  d.alpha2 = std::move(a2);
  d.gamma = std::move(g);
  return d;
}

DroopSet random_droops(std::mt19937& rng) {
  std::uniform_int_distribution<int> size(1, 40);
  std::uniform_real_distribution<double> coeff(0.0, 5.0);
  const int n = size(rng);
  DroopSet d;
  for (int i = 0; i < n; ++i) {
    d.alpha1.push_back(coeff(rng));
    d.alpha2.push_back(coeff(rng));
    d.gamma.push_back(coeff(rng));
  }
  // Keep the normalizing sums away from zero.
  d.alpha2[0] += 0.5;
  d.gamma[0] += 0.5;
  return d;
}

}  // namespace

TEST_CASE("omega_uncontrolled is the imbalance over total damping") {
  DroopSet d = make_droops({10, 10}, {1, 1}, {20, 30});
  CHECK(omega_uncontrolled(0.0, d) == doctest::Approx(0.0));
  CHECK(omega_uncontrolled(100.0, d) == doctest::Approx(2.0));
  CHECK(omega_uncontrolled(-100.0, d) == doctest::Approx(-2.0));

  DroopSet no_damping = make_droops({1}, {1}, {0});
  CHECK_THROWS_AS(omega_uncontrolled(1.0, no_damping), std::domain_error);
}

TEST_CASE("omega_primary uses the with-primary denominator when active") {
  DroopSet d = make_droops({100, 50}, {1, 1}, {25, 25});
  CHECK(omega_primary(100.0, d, true) == doctest::Approx(0.5));
  CHECK(omega_primary(100.0, d, false) == doctest::Approx(2.0));
  CHECK(omega_primary(0.0, d, true) == doctest::Approx(0.0));
}

TEST_CASE("renormalized droop shares") {
  SUBCASE("identical generators split evenly in both regimes") {
    DroopSet d = make_droops({2, 2, 2, 2}, {1, 1, 1, 1}, {0.3, 0.3, 0.3, 0.3});
    for (int regime : {0, 1}) {
      std::vector<double> share = renormalized_droop(d, regime);
      for (double s : share) CHECK(s == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
  SUBCASE("regime 0 reduces to the secondary shares") {
    DroopSet d = make_droops({1, 2, 3}, {2, 1, 1}, {0.7, 0.1, 0.4});
    std::vector<double> share = renormalized_droop(d, 0);
    CHECK(share[0] == doctest::Approx(0.5));
    CHECK(share[1] == doctest::Approx(0.25));
    CHECK(share[2] == doctest::Approx(0.25));
  }
  SUBCASE("pinned heterogeneous instance") {
    // Hand evaluation: sum(gamma) = 0.2, sum(alpha2) = 1.0,
    // sum(alpha1 + gamma) = 0.8, so shares are (0.1 + 0.3*0.2)/0.8 etc.
    DroopSet d = make_droops({0.1, 0.2, 0.3}, {0.3, 0.3, 0.4}, {0.05, 0.05, 0.1});
    std::vector<double> share = renormalized_droop(d, 1);
    CHECK(share[0] == doctest::Approx(0.200).epsilon(1e-12));
    CHECK(share[1] == doctest::Approx(0.325).epsilon(1e-12));
    CHECK(share[2] == doctest::Approx(0.475).epsilon(1e-12));
  }
  SUBCASE("shares sum to one for random droop sets") {
    std::mt19937 rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
      DroopSet d = random_droops(rng);
      for (int regime : {0, 1}) {
        std::vector<double> share = renormalized_droop(d, regime);
        const double sum = std::accumulate(share.begin(), share.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("respond applies the dead-zone trigger on the aggregate imbalance") {
  DroopSet d = make_droops({1, 1}, {1, 1}, {0.1, 0.1});
  const std::vector<double> p0 = {120.0, 60.0};

  SUBCASE("zero wind deviation leaves the dispatch untouched") {
    PolicyResponse r = respond(p0, d, Deadband{10.0}, {0.0, 0.0});
    CHECK(r.regime == 0);
    CHECK(r.omega1 == doctest::Approx(0.0));
    CHECK(r.p[0] == doctest::Approx(120.0));
    CHECK(r.p[1] == doctest::Approx(60.0));
  }
  SUBCASE("zero threshold makes any imbalance primary-active") {
    PolicyResponse r = respond(p0, d, Deadband{0.0}, {0.5, -0.2});
    CHECK(r.regime == 1);
  }
  SUBCASE("threshold in MW: 200 trips, 50 does not") {
    CHECK(respond(p0, d, Deadband{100.0}, {150.0, 50.0}).regime == 1);
    CHECK(respond(p0, d, Deadband{100.0}, {25.0, 25.0}).regime == 0);
    // Tie resolves inside the dead zone.
    CHECK(respond(p0, d, Deadband{100.0}, {100.0, 0.0}).regime == 0);
  }
  SUBCASE("response absorbs the full deviation") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (int rep = 0; rep < 1000; ++rep) {
      DroopSet dd = random_droops(rng);
      std::vector<double> base(dd.size(), 10.0);
      std::vector<double> rho = {u(rng), u(rng), u(rng)};
      PolicyResponse r = respond(base, dd, Deadband{50.0}, rho);
      const double absorbed =
          std::accumulate(base.begin(), base.end(), 0.0) -
          std::accumulate(r.p.begin(), r.p.end(), 0.0);
      const double total = rho[0] + rho[1] + rho[2];
      CHECK(std::abs(absorbed - total) < 1e-9);
    }
  }
  SUBCASE("zero threshold equals forcing the primary regime") {
    PolicyResponse a = respond(p0, d, Deadband{0.0}, {40.0, -10.0});
    PolicyResponse b = respond(p0, d, Deadband{500.0}, {40.0, -10.0},
                               DeadbandTrigger::WithPrimaryEquilibrium, 1);
    CHECK(a.regime == b.regime);
    CHECK(a.p[0] == doctest::Approx(b.p[0]));
    CHECK(a.omega1 == doctest::Approx(b.omega1));
  }
  SUBCASE("positively homogeneous within a regime") {
    PolicyResponse one = respond(p0, d, Deadband{100.0}, {200.0, 100.0});
    PolicyResponse two = respond(p0, d, Deadband{100.0}, {400.0, 200.0});
    CHECK(one.regime == two.regime);
    CHECK(2.0 * (p0[0] - one.p[0]) == doctest::Approx(p0[0] - two.p[0]));
    CHECK(2.0 * one.omega1 == doctest::Approx(two.omega1));
  }
}

TEST_CASE("free-response trigger trips at a smaller imbalance") {
  DroopSet d = make_droops({1, 1}, {1, 1}, {0.1, 0.1});
  const double with_primary = regime_boundary_mw(d, Deadband{100.0});
  const double free_resp =
      regime_boundary_mw(d, Deadband{100.0}, DeadbandTrigger::FreeResponse);
  CHECK(with_primary == doctest::Approx(100.0));
  CHECK(free_resp == doctest::Approx(100.0 * 0.2 / 2.2));
  CHECK(regime_of(50.0, d, Deadband{100.0}) == 0);
  CHECK(regime_of(50.0, d, Deadband{100.0}, DeadbandTrigger::FreeResponse) == 1);
}
