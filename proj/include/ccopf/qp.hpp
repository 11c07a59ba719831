// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <Eigen/Dense>

namespace ccopf {

/// min 1/2 x'diag(q)x + c'x + c0  s.t.  A x = b,  G x <= h.
struct QpProblem {
  Eigen::VectorXd q_diag;  // >= 0 entrywise
  Eigen::VectorXd c;
  double c0 = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;

  int num_vars() const { return static_cast<int>(c.size()); }
  void check_dimensions() const;  // throws std::invalid_argument
};

enum class QpStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string qp_status_name(QpStatus s);

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // inequality multipliers (>= 0)
  double objective = 0.0;
  QpStatus status = QpStatus::NumericalFailure;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct QpWarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd s;
};

/// Dense Mehrotra predictor-corrector interior point. Deterministic; KKT
/// residuals below 1e-8 on Optimal.
QpSolution solve_qp(const QpProblem& problem, const QpWarmStart* warm = nullptr,
                    int max_iterations = 100);

}  // namespace ccopf
