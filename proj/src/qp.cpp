// SPDX-License-Identifier: Apache-2.0
#include "ccopf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccopf {

void QpProblem::check_dimensions() const {
  const int n = num_vars();
  if (q_diag.size() != n) throw std::invalid_argument("q_diag/c size mismatch");
  for (int i = 0; i < n; ++i)
    if (q_diag(i) < 0.0) throw std::invalid_argument("q_diag must be nonnegative");
  if (A.rows() != b.size()) throw std::invalid_argument("A/b row mismatch");
  if (A.rows() > 0 && A.cols() != n) throw std::invalid_argument("A column mismatch");
  if (G.rows() != h.size()) throw std::invalid_argument("G/h row mismatch");
  if (G.rows() > 0 && G.cols() != n) throw std::invalid_argument("G column mismatch");
}

std::string qp_status_name(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::IterationLimit: return "iteration-limit";
    case QpStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

namespace {

double objective_of(const QpProblem& p, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(p.q_diag.cwiseProduct(x)) + p.c.dot(x) + p.c0;
}

// Largest alpha in [0, 1] with v + alpha * dv >= (1 - tau) * v.
double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (int i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) alpha = std::min(alpha, -tau * v(i) / dv(i));
  return alpha;
}

}  // namespace

QpSolution solve_qp(const QpProblem& problem, const QpWarmStart* warm, int max_iterations) {
  problem.check_dimensions();
  const int n = problem.num_vars();
  const int me = static_cast<int>(problem.A.rows());
  const int mi = static_cast<int>(problem.G.rows());

  QpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  sol.y = Eigen::VectorXd::Zero(me);
  sol.z = Eigen::VectorXd::Zero(mi);

  const double scale = 1.0 + std::max({problem.c.size() ? problem.c.cwiseAbs().maxCoeff() : 0.0,
                                       me ? problem.b.cwiseAbs().maxCoeff() : 0.0,
                                       mi ? problem.h.cwiseAbs().maxCoeff() : 0.0});
  const double tol_feas = 1e-9 * scale;
  const double tol_comp = 1e-10 * scale;

  // Equality-only problems reduce to one saddle-point solve.
  if (mi == 0) {
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + me, n + me);
    kkt.topLeftCorner(n, n) = problem.q_diag.asDiagonal();
    kkt.topLeftCorner(n, n).diagonal().array() += 1e-12 * scale;
    if (me) {
      kkt.topRightCorner(n, me) = problem.A.transpose();
      kkt.bottomLeftCorner(me, n) = problem.A;
    }
    Eigen::VectorXd rhs(n + me);
    rhs.head(n) = -problem.c;
    if (me) rhs.tail(me) = problem.b;
    Eigen::VectorXd xy = kkt.partialPivLu().solve(rhs);
    sol.x = xy.head(n);
    if (me) sol.y = xy.tail(me);
    const double rd = (problem.q_diag.cwiseProduct(sol.x) + problem.c +
                       (me ? Eigen::VectorXd(problem.A.transpose() * sol.y)
                           : Eigen::VectorXd::Zero(n)))
                          .cwiseAbs()
                          .maxCoeff();
    const double rp = me ? (problem.A * sol.x - problem.b).cwiseAbs().maxCoeff() : 0.0;
    sol.kkt_residual = std::max(rd, rp);
    sol.iterations = 1;
    sol.objective = objective_of(problem, sol.x);
    sol.status = sol.kkt_residual <= 1e-8 * scale ? QpStatus::Optimal
                                                  : QpStatus::NumericalFailure;
    return sol;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(mi);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(mi);
  if (warm && warm->x.size() == n) {
    x = warm->x;
    if (warm->y.size() == me) y = warm->y;
    if (warm->z.size() == mi) z = warm->z.cwiseMax(1e-2);
    // Keep the iterate but push the slacks safely inside.
    s = (problem.h - problem.G * x).cwiseMax(1e-2);
  } else {
    s = (problem.h - problem.G * x).cwiseMax(1.0);
  }

  const auto compute_residuals = [&](Eigen::VectorXd& rd, Eigen::VectorXd& rp,
                                     Eigen::VectorXd& rg) {
    rd = problem.q_diag.cwiseProduct(x) + problem.c + problem.G.transpose() * z;
    if (me) rd += problem.A.transpose() * y;
    rp = me ? Eigen::VectorXd(problem.A * x - problem.b) : Eigen::VectorXd::Zero(0);
    rg = problem.G * x + s - problem.h;
  };

  Eigen::MatrixXd kkt(n + me, n + me);
  Eigen::VectorXd rd, rp, rg;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    compute_residuals(rd, rp, rg);
    const double mu = s.dot(z) / mi;
    const double comp_max = s.cwiseProduct(z).maxCoeff();
    const double primal_inf = std::max(me ? rp.cwiseAbs().maxCoeff() : 0.0,
                                       rg.cwiseAbs().maxCoeff());
    const double dual_inf = rd.cwiseAbs().maxCoeff();

    if (dual_inf <= tol_feas && primal_inf <= tol_feas && comp_max <= tol_comp) break;
    if (!std::isfinite(mu) || !std::isfinite(dual_inf)) {
      sol.status = QpStatus::NumericalFailure;
      sol.iterations = iter;
      return sol;
    }
    // Diverging multipliers with tiny complementarity: primal infeasible.
    if (z.maxCoeff() > 1e12 * scale && primal_inf > 1e-6 * scale) {
      sol.status = QpStatus::Infeasible;
      sol.iterations = iter;
      sol.x = x;
      return sol;
    }

    Eigen::VectorXd w = z.cwiseQuotient(s).cwiseMin(1e16);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = Eigen::MatrixXd(problem.q_diag.asDiagonal()) +
                              problem.G.transpose() * w.asDiagonal() * problem.G;
    kkt.topLeftCorner(n, n).diagonal().array() += 1e-12 * scale;
    if (me) {
      kkt.topRightCorner(n, me) = problem.A.transpose();
      kkt.bottomLeftCorner(me, n) = problem.A;
      kkt.bottomRightCorner(me, me).diagonal().array() -= 1e-12 * scale;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);

    const auto solve_direction = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx,
                                     Eigen::VectorXd& dy, Eigen::VectorXd& dz,
                                     Eigen::VectorXd& ds) {
      // Eliminate ds = -rg - G dx, dz = (-rc - z .* ds) ./ s.
      Eigen::VectorXd rhs1 = -rd - problem.G.transpose() *
                                       ((-rc + z.cwiseProduct(rg)).cwiseQuotient(s));
      Eigen::VectorXd rhs(n + me);
      rhs.head(n) = rhs1;
      if (me) rhs.tail(me) = -rp;
      Eigen::VectorXd dxy = lu.solve(rhs);
      dx = dxy.head(n);
      if (me) dy = dxy.tail(me);
      ds = -rg - problem.G * dx;
      dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    // Predictor.
    Eigen::VectorXd dx_aff, dy_aff, dz_aff, ds_aff;
    Eigen::VectorXd rc_aff = s.cwiseProduct(z);
    solve_direction(rc_aff, dx_aff, dy_aff, dz_aff, ds_aff);
    const double alpha_p_aff = step_to_boundary(s, ds_aff, 1.0);
    const double alpha_d_aff = step_to_boundary(z, dz_aff, 1.0);
    const double mu_aff = (s + alpha_p_aff * ds_aff).dot(z + alpha_d_aff * dz_aff) / mi;
    const double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);

    // Corrector.
    Eigen::VectorXd rc = s.cwiseProduct(z) + ds_aff.cwiseProduct(dz_aff) -
                         Eigen::VectorXd::Constant(mi, sigma * mu);
    Eigen::VectorXd dx, dy, dz, ds;
    solve_direction(rc, dx, dy, dz, ds);

    const double tau = mu > 1e-8 * scale ? 0.995 : 0.99995;
    const double alpha_p = step_to_boundary(s, ds, tau);
    const double alpha_d = step_to_boundary(z, dz, tau);
    x += alpha_p * dx;
    s += alpha_p * ds;
    if (me) y += alpha_d * dy;
    z += alpha_d * dz;
  }

  compute_residuals(rd, rp, rg);
  const double comp = s.cwiseProduct(z).cwiseAbs().maxCoeff();
  sol.x = x;
  sol.y = y;
  sol.z = z;
  sol.iterations = iter;
  sol.objective = objective_of(problem, x);
  sol.kkt_residual = std::max({rd.cwiseAbs().maxCoeff(),
                               me ? rp.cwiseAbs().maxCoeff() : 0.0,
                               (problem.G * x - problem.h).maxCoeff(), comp});
  if (iter >= max_iterations)
    sol.status = QpStatus::IterationLimit;
  else
    sol.status = sol.kkt_residual <= 1e-8 * scale ? QpStatus::Optimal
                                                  : QpStatus::NumericalFailure;
  return sol;
}

}  // namespace ccopf
