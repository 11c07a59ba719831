// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>

namespace ccopf {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Adaptive Gauss(7)-Kronrod(15) bisection. Converged when the error estimate
/// falls below abs_tol or below rel_tol times the integral magnitude. Returns
/// a non-converged result (with the achieved error) instead of throwing when
/// the subdivision budget runs out.
QuadratureResult gauss_kronrod_adaptive(const std::function<double(double)>& f, double a,
                                        double b, double abs_tol, double rel_tol = 0.0,
                                        int max_subdivisions = 4000);

}  // namespace ccopf
