// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccopf/grid.hpp"
#include "ccopf/policy.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

double gaussian_cdf(double z);
double gaussian_pdf(double z);

/// Standard-normal quantile, accurate to 1e-10 on (0,1).
/// Throws std::domain_error outside (0,1).
double gaussian_quantile(double q);

enum class ConstraintSubject {
  GeneratorUpper,
  GeneratorLower,
  LineUpper,
  LineLower,
};

bool is_upper_side(ConstraintSubject s);
bool is_generator_subject(ConstraintSubject s);
std::string subject_name(ConstraintSubject s);

struct ConstraintSpec {
  ConstraintSubject subject = ConstraintSubject::GeneratorUpper;
  int index = 0;   // generator or line index
  int regime = 0;  // dead-zone regime the constraint conditions on
  double epsilon = 0.0;
};

/// Analytic Gaussian tightening of generator and line limits under the fixed
/// affine policy (regime 1 participation, no dead zone). Constraining the
/// mean dispatch to these limits enforces the probabilistic constraints
/// exactly under the Gaussian model.
struct TightenedLimits {
  std::vector<double> gen_lower;   // effective lower bound on mean output
  std::vector<double> gen_upper;   // effective upper bound on mean output
  std::vector<double> gen_margin;  // z * std(p_i)
  std::vector<double> line_margin; // z * std(flow_l); limits are symmetric
  bool feasible = true;
  std::string infeasible_detail;
};

TightenedLimits analytic_cc_tightening(const GridCase& grid, const PtdfMatrix& ptdf,
                                       const DroopSet& droops, const WindStatistics& wind,
                                       double epsilon);

struct WccEvaluation {
  double value = 0.0;           // E[ weight(subject) * 1{regime event} ]
  double d_value_d_mean = 0.0;  // derivative w.r.t. a shift of the subject mean, per MW
  double quad_error = 0.0;      // achieved quadrature error estimate
};

/// Weighted chance-constraint value for one constraint. The weight is
/// exp(+(x - weight_ref)/weight_scale) for upper-side subjects and
/// exp(-(x - weight_ref)/weight_scale) for lower-side subjects; the regime
/// event is {|s| <= deadband} for regime 0 and its complement for regime 1,
/// with s the aggregate deviation the moments were built over. Evaluated as a
/// one-dimensional adaptive quadrature along s with the regime boundaries as
/// subdivision breakpoints; exact point-mass handling when the variance is 0.
WccEvaluation wcc_evaluate(const ConstraintSpec& spec, const RegimeMoments& moments,
                           const Deadband& deadband, double weight_scale,
                           double weight_ref = 0.0);

/// Closed form E[exp(dir*(x - ref)/scale)] for x ~ N(mean, var): the
/// regime-partition identity target.
double exp_weight_gaussian_mean(double mean, double var, double scale, bool upper_side,
                                double ref = 0.0);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Monte Carlo oracle for wcc_evaluate: n wind-fluctuation draws pushed
/// through the exact dead-zone response. Deterministic for fixed (seed, n).
McEstimate wcc_mc_oracle(const ConstraintSpec& spec, const GridCase& grid,
                         const PtdfMatrix& ptdf, const DroopSet& droops,
                         const std::vector<double>& p0, const WindStatistics& wind,
                         const Deadband& deadband, std::int64_t n, std::uint64_t seed,
                         double weight_scale, double weight_ref = 0.0);

/// Monte Carlo estimate of the step-function form: E[ 1{bound violated} *
/// 1{regime event} ] against the physical limits. Validation-only.
McEstimate step_cc_probability(const ConstraintSpec& spec, const GridCase& grid,
                               const PtdfMatrix& ptdf, const DroopSet& droops,
                               const std::vector<double>& p0, const WindStatistics& wind,
                               const Deadband& deadband, std::int64_t n, std::uint64_t seed);

}  // namespace ccopf
