// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "ccopf/qp.hpp"

using namespace ccopf;

namespace {

QpProblem bound_problem() {
  // minimize x^2 subject to x >= 1
  QpProblem p;
  p.q_diag = Eigen::VectorXd::Constant(1, 2.0);
  p.c = Eigen::VectorXd::Zero(1);
  p.A.resize(0, 1);
  p.b.resize(0);
  p.G.resize(1, 1);
  p.G << -1.0;
  p.h.resize(1);
  p.h << -1.0;
  return p;
}

// Exhaustive search oracle for 3-variable instances with one sum equality:
// grid the first two coordinates, eliminate the third through the balance.
double grid_search_3var(const QpProblem& p, double lo, double hi, double step) {
  REQUIRE(p.num_vars() == 3);
  REQUIRE(p.A.rows() == 1);
  double best = std::numeric_limits<double>::infinity();
  for (double x0 = lo; x0 <= hi; x0 += step) {
    for (double x1 = lo; x1 <= hi; x1 += step) {
      const double x2 = (p.b(0) - p.A(0, 0) * x0 - p.A(0, 1) * x1) / p.A(0, 2);
      if (x2 < lo || x2 > hi) continue;
      const double x[3] = {x0, x1, x2};
      bool ok = true;
      for (int r = 0; r < p.G.rows() && ok; ++r) {
        double gx = 0.0;
        for (int j = 0; j < 3; ++j) gx += p.G(r, j) * x[j];
        ok = gx <= p.h(r) + 1e-12;
      }
      if (!ok) continue;
      double obj = p.c0;
      for (int j = 0; j < 3; ++j) obj += 0.5 * p.q_diag(j) * x[j] * x[j] + p.c(j) * x[j];
      best = std::min(best, obj);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("active bound") {
  QpSolution s = solve_qp(bound_problem());
  REQUIRE(s.status == QpStatus::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.kkt_residual < 1e-8);
}

TEST_CASE("symmetric equality split") {
  QpProblem p;
  p.q_diag = Eigen::VectorXd::Constant(2, 2.0);
  p.c = Eigen::VectorXd::Zero(2);
  p.A = Eigen::MatrixXd::Ones(1, 2);
  p.b = Eigen::VectorXd::Constant(1, 2.0);
  p.G.resize(0, 2);
  p.h.resize(0);
  QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.x(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("three variables against the grid oracle") {
  QpProblem p;
  p.q_diag.resize(3);
  p.q_diag << 2.0, 4.0, 1.0;
  p.c.resize(3);
  p.c << -1.0, 0.5, -2.0;
  p.A = Eigen::MatrixXd::Ones(1, 3);
  p.b = Eigen::VectorXd::Constant(1, 1.5);
  p.G.resize(2, 3);
  p.G << 1.0, 0.0, 0.0,
         0.0, -1.0, 1.0;
  p.h.resize(2);
  p.h << 0.4, 0.6;
  QpSolution s = solve_qp(p);
  REQUIRE(s.status == QpStatus::Optimal);
  CHECK(s.kkt_residual < 1e-8);
  const double oracle = grid_search_3var(p, -2.0, 2.0, 1e-3);
  CHECK(s.objective <= oracle + 1e-9);
  CHECK(std::abs(s.objective - oracle) < 5e-3);
}

TEST_CASE("random feasible instances satisfy the KKT tolerances") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rep % 6;
    const int mi = 1 + rep % 5;
    QpProblem p;
    p.q_diag.resize(n);
    for (int i = 0; i < n; ++i) p.q_diag(i) = (rep % 4 == 0 && i == 0) ? 0.0 : 1.0 + u(rng);
    p.c.resize(n);
    for (int i = 0; i < n; ++i) p.c(i) = 2.0 * u(rng);
    p.A.resize(1, n);
    for (int i = 0; i < n; ++i) p.A(0, i) = 1.0;
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = u(rng);
    p.b = p.A * x0;
    p.G.resize(mi, n);
    for (int r = 0; r < mi; ++r)
      for (int i = 0; i < n; ++i) p.G(r, i) = u(rng);
    p.h = p.G * x0 + Eigen::VectorXd::Constant(mi, 0.5);  // strictly feasible x0
    QpSolution s = solve_qp(p);
    REQUIRE(s.status == QpStatus::Optimal);
    CHECK(s.kkt_residual < 1e-8);
  }
}

TEST_CASE("infeasible bounds are detected") {
  QpProblem p = bound_problem();
  // add x <= 0, contradicting x >= 1
  p.G.conservativeResize(2, 1);
  p.G(1, 0) = 1.0;
  p.h.conservativeResize(2);
  p.h(1) = 0.0;
  QpSolution s = solve_qp(p);
  CHECK(s.status != QpStatus::Optimal);
}

TEST_CASE("solutions are bit-reproducible") {
  QpProblem p;
  p.q_diag.resize(3);
  p.q_diag << 2.0, 4.0, 1.0;
  p.c.resize(3);
  p.c << -1.0, 0.5, -2.0;
  p.A = Eigen::MatrixXd::Ones(1, 3);
  p.b = Eigen::VectorXd::Constant(1, 1.5);
  p.G = -Eigen::MatrixXd::Identity(3, 3);
  p.h = Eigen::VectorXd::Zero(3);
  QpSolution a = solve_qp(p);
  QpSolution b = solve_qp(p);
  REQUIRE(a.status == QpStatus::Optimal);
  for (int i = 0; i < 3; ++i) CHECK(a.x(i) == b.x(i));  // exact equality
  CHECK(a.objective == b.objective);
}
