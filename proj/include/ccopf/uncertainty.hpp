// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "ccopf/grid.hpp"
#include "ccopf/policy.hpp"

namespace ccopf {

struct SingularCovariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-farm Gaussian statistics, independent across farms.
///
/// Two views of the same farms are used downstream:
///  - injections(): means are the forecasts; what validation samples.
///  - fluctuations(): means are zero; the forecast-error distribution the
///    dispatch formulations propagate (the scheduled forecast is netted into
///    the power balance instead).
struct WindStatistics {
  std::vector<double> means;      // MW
  std::vector<double> variances;  // MW^2

  static WindStatistics injections(const GridCase& grid);
  static WindStatistics fluctuations(const GridCase& grid);

  int size() const { return static_cast<int>(means.size()); }
};

/// (total mean, total variance); farms are independent.
std::pair<double, double> aggregate_wind(const WindStatistics& wind);

/// Regime-conditioned first and second moments of (generator output,
/// frequency deviation) and (line flow, frequency deviation) pairs, plus the
/// aggregate-deviation axis all evaluators integrate along.
struct RegimeMoments {
  int regime = 0;
  double denominator = 0.0;      // sum(regime * alpha1 + gamma)
  double imbalance_mean = 0.0;   // mean of s = sum(rho), MW
  double imbalance_var = 0.0;    // MW^2

  double omega_mean = 0.0;
  double omega_var = 0.0;

  std::vector<double> p_mean;
  std::vector<double> p_omega_cov;
  std::vector<double> p_var;

  std::vector<double> flow_mean;
  std::vector<double> flow_omega_cov;
  std::vector<double> flow_var;

  // Conditional representation of a subject along the imbalance axis:
  // x | s ~ N(mean + slope * (s - imbalance_mean), residual_var).
  struct Conditional {
    double mean = 0.0;
    double slope = 0.0;
    double residual_var = 0.0;
  };
  Conditional generator_conditional(int g) const;
  Conditional line_conditional(int l) const;
};

/// Propagates wind fluctuation statistics through the response policy for the
/// given regime. `wind` must be the fluctuation view; its mean shifts the
/// subject means exactly as a biased forecast error would.
RegimeMoments sigma_moments(const GridCase& grid, const PtdfMatrix& ptdf,
                            const DroopSet& droops, const std::vector<double>& p0,
                            const WindStatistics& wind, int regime);

/// Symmetric 2x2 precision matrix (inverse covariance).
struct PrecisionMatrix {
  double pp = 0.0;
  double pw = 0.0;
  double ww = 0.0;
};

/// Closed-form 2x2 inverse. Throws SingularCovariance when the determinant is
/// below the relative floor (the single-source rank-1 degeneracy); callers
/// must then use the conditional representation above.
PrecisionMatrix precision(double theta_pp, double theta_pw, double theta_ww);

}  // namespace ccopf
