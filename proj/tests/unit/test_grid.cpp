// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "ccopf/grid.hpp"
#include "ccopf/io.hpp"

using namespace ccopf;

namespace {

const char* kTwoBusDoc = R"({
  "slack_bus": 1,
  "buses": [{"id": 1, "load": 0.0}, {"id": 2, "load": 50.0}],
  "generators": [{"bus": 1, "p_min": 0, "p_max": 100, "cost_quad": 0.01,
                  "cost_lin": 5, "cost_const": 0, "alpha1": 1, "alpha2": 1, "gamma": 0.1}],
  "lines": [{"from": 1, "to": 2, "susceptance": 10, "limit": 80}],
  "wind_farms": [{"bus": 2, "forecast": 10, "stdev": 1}]
})";

GridCase triangle_case() {
  // Symmetric 3-bus triangle, equal susceptances.
  GridCase g;
  g.slack_bus = 3;
  g.buses = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
  g.generators = {{1, 0, 100, 0.01, 1, 0, 1, 1, 0.1}};
  g.lines = {{1, 2, 5.0, 100.0}, {2, 3, 5.0, 100.0}, {1, 3, 5.0, 100.0}};
  g.finalize();
  return g;
}

}  // namespace

TEST_CASE("load_case round-trips a minimal document") {
  GridCase g = load_case_string(kTwoBusDoc);
  CHECK(g.bus_count() == 2);
  CHECK(g.lines.size() == 1);
  CHECK(g.generators.size() == 1);
  CHECK(g.wind_farms.size() == 1);
  CHECK(g.total_load() == doctest::Approx(50.0));

  GridCase again = load_case_string(save_case(g));
  CHECK(again.bus_count() == g.bus_count());
  CHECK(again.lines.size() == g.lines.size());
  CHECK(again.generators[0].p_max == g.generators[0].p_max);
  CHECK(again.wind_farms[0].stdev == g.wind_farms[0].stdev);
  CHECK(again.slack_bus == g.slack_bus);
}

TEST_CASE("load_case reads the 118-bus study case") {
  GridCase g = load_case_file(std::string(CCOPF_DATA_DIR) + "/case118_wind.json");
  CHECK(g.bus_count() == 118);
  CHECK(g.generators.size() == 54);
  CHECK(g.lines.size() == 186);
  CHECK(g.wind_farms.size() == 9);
  const std::vector<int> wind_buses = {3, 8, 11, 20, 24, 38, 43, 49, 50};
  double total = 0.0;
  for (std::size_t i = 0; i < g.wind_farms.size(); ++i) {
    CHECK(g.wind_farms[i].bus == wind_buses[i]);
    total += g.wind_farms[i].forecast;
  }
  CHECK(total == doctest::Approx(1053.0));
}

TEST_CASE("validation errors name the offending record") {
  SUBCASE("dangling bus reference") {
    std::string doc = kTwoBusDoc;
    doc.replace(doc.find("\"bus\": 2, \"forecast\""), 8, "\"bus\": 999");
    CHECK_THROWS_WITH_AS(load_case_string(doc),
                         doctest::Contains("999"), CaseValidationError);
  }
  SUBCASE("negative line limit") {
    std::string doc = kTwoBusDoc;
    doc.replace(doc.find("\"limit\": 80"), 11, "\"limit\": -80");
    CHECK_THROWS_AS(load_case_string(doc), CaseValidationError);
  }
  SUBCASE("disconnected graph") {
    GridCase g;
    g.slack_bus = 1;
    g.buses = {{1, 0.0}, {2, 10.0}, {3, 0.0}};
    g.generators = {{1, 0, 100, 0, 1, 0, 1, 1, 0.1}};
    g.lines = {{1, 2, 10.0, 50.0}};
    CHECK_THROWS_WITH_AS(g.finalize(), doctest::Contains("disconnected"),
                         CaseValidationError);
  }
  SUBCASE("duplicate bus id") {
    GridCase g;
    g.slack_bus = 1;
    g.buses = {{1, 0.0}, {1, 5.0}};
    g.generators = {{1, 0, 100, 0, 1, 0, 1, 1, 0.1}};
    CHECK_THROWS_AS(g.finalize(), CaseValidationError);
  }
  SUBCASE("malformed document is a parse error") {
    CHECK_THROWS_AS(load_case_string("{ nope"), ParseError);
  }
}

TEST_CASE("apply_case_modifiers scales limits and loads") {
  GridCase g = load_case_string(kTwoBusDoc);
  GridCase m = apply_case_modifiers(g, 0.25, 1.10);
  CHECK(m.lines[0].limit == doctest::Approx(60.0));
  CHECK(m.buses[1].load == doctest::Approx(55.0));
  CHECK(m.generators[0].p_max == g.generators[0].p_max);

  SUBCASE("identity modifiers change nothing") {
    GridCase id = apply_case_modifiers(g, 0.0, 1.0);
    CHECK(id.lines[0].limit == g.lines[0].limit);
    CHECK(id.buses[1].load == g.buses[1].load);
  }
  SUBCASE("modifiers compose multiplicatively") {
    GridCase twice = apply_case_modifiers(apply_case_modifiers(g, 0.2, 1.1), 0.5, 1.2);
    GridCase once = apply_case_modifiers(g, 1.0 - 0.8 * 0.5, 1.1 * 1.2);
    CHECK(twice.lines[0].limit == doctest::Approx(once.lines[0].limit));
    CHECK(twice.buses[1].load == doctest::Approx(once.buses[1].load));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(apply_case_modifiers(g, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_case_modifiers(g, 0.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("ptdf on a single line is a unit sensitivity") {
  GridCase g = load_case_string(kTwoBusDoc);
  PtdfMatrix ptdf = build_ptdf(g);
  CHECK(ptdf.entries(0, g.slack_index()) == doctest::Approx(0.0));
  CHECK(std::abs(ptdf.entries(0, g.bus_index(2))) == doctest::Approx(1.0));

  Eigen::VectorXd inj(2);
  inj << -50.0, 50.0;
  Eigen::VectorXd flows = dc_flows(ptdf, inj);
  CHECK(std::abs(flows(0)) == doctest::Approx(50.0));
}

TEST_CASE("ptdf splits the symmetric triangle 2/3 - 1/3") {
  GridCase g = triangle_case();
  PtdfMatrix ptdf = build_ptdf(g);
  // Injection at bus 1, withdrawal at the slack (bus 3): two thirds take the
  // direct line 1-3, one third the path 1-2-3.
  const int b1 = g.bus_index(1);
  CHECK(ptdf.entries(2, b1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(ptdf.entries(0, b1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(ptdf.entries(1, b1) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  // +90 at bus 1, -90 at bus 2: 60 MW direct, 30 MW around.
  Eigen::VectorXd inj(3);
  inj << 90.0, -90.0, 0.0;
  Eigen::VectorXd flows = dc_flows(ptdf, inj);
  CHECK(flows(0) == doctest::Approx(60.0).epsilon(1e-9));
  CHECK(std::abs(flows(1)) == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(std::abs(flows(2)) == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("dc_flows checks balance and is linear") {
  GridCase g = triangle_case();
  PtdfMatrix ptdf = build_ptdf(g);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK(dc_flows(ptdf, zero).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  Eigen::VectorXd bad(3);
  bad << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(dc_flows(ptdf, bad), std::invalid_argument);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(3), y(3);
    x << u(rng), u(rng), 0.0;
    x(2) = -x.sum();
    y << u(rng), u(rng), 0.0;
    y(2) = -y.sum();
    const double a = u(rng) / 50.0, b = u(rng) / 50.0;
    Eigen::VectorXd lhs = dc_flows(ptdf, a * x + b * y);
    Eigen::VectorXd rhs = a * dc_flows(ptdf, x) + b * dc_flows(ptdf, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("ptdf flows are slack-invariant for balanced injections") {
  GridCase g = load_case_file(std::string(CCOPF_DATA_DIR) + "/case118_wind.json");
  PtdfMatrix a = build_ptdf(g);
  GridCase g2 = g;
  g2.slack_bus = 17;
  g2.finalize();
  PtdfMatrix b = build_ptdf(g2);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  Eigen::VectorXd inj(g.bus_count());
  for (int i = 0; i < g.bus_count(); ++i) inj(i) = u(rng);
  inj.array() -= inj.mean();
  Eigen::VectorXd fa = dc_flows(a, inj);
  Eigen::VectorXd fb = dc_flows(b, inj);
  const double scale = std::max(1.0, fa.cwiseAbs().maxCoeff());
  CHECK((fa - fb).cwiseAbs().maxCoeff() / scale < 1e-9);
}
