// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccopf/cceval.hpp"
#include "ccopf/grid.hpp"
#include "ccopf/policy.hpp"
#include "ccopf/qp.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

enum class Formulation { Dcopf, Ccopf, CcopfPfr };
enum class SolveStatus { Optimal, Infeasible, IterationLimit };

std::string formulation_name(Formulation f);
Formulation formulation_from_name(const std::string& name);
std::string solve_status_name(SolveStatus s);

/// One retained linearization of a weighted constraint: coeffs . p0 <= offset.
struct Cut {
  int constraint_id = 0;
  std::vector<double> coeffs;
  double offset = 0.0;
  int iteration = 0;
};

/// Final value of one weighted constraint at the returned dispatch, reported
/// in limit-centered form together with the scale it was enforced at.
struct ConstraintValue {
  ConstraintSpec spec;
  double value = 0.0;
  double bound = 0.0;         // epsilon it was enforced against
  double weight_scale = 0.0;  // decay scale t, MW
  double weight_ref = 0.0;    // centering point (the physical limit)
};

struct DispatchSolution {
  std::vector<double> p0;  // set points, MW
  double objective = 0.0;        // expected cost incl. variance offset, $
  double setpoint_cost = 0.0;    // sum C_i(p0_i)
  double variance_offset = 0.0;  // sum cost_quad_i * Var(p_i)
  Formulation formulation = Formulation::Dcopf;
  SolveStatus status = SolveStatus::Infeasible;
  int iterations = 0;      // cutting-plane iterations (1 for single QP)
  int qp_iterations = 0;   // interior-point iterations, total
  double epsilon = 0.0;
  double deadband_mw = 0.0;
  double max_violation = 0.0;  // residual weighted-constraint excess over epsilon
  double solve_seconds = 0.0;
  std::uint64_t case_hash = 0;  // set by the I/O layer
  std::vector<Cut> cuts;
  std::vector<ConstraintValue> constraint_report;
  std::vector<double> violation_trace;  // max weighted excess per cutting iteration
  std::string detail;  // infeasibility / iteration-limit diagnostics
};

/// Deterministic DC-OPF: wind fixed at forecast, physical limits only.
DispatchSolution solve_dcopf(const GridCase& grid, const PtdfMatrix& ptdf);

/// Standard chance-constrained OPF under the fixed affine policy: analytic
/// Gaussian tightenings, solved as a single QP. `wind` is the fluctuation
/// view (zero means unless the forecast error is biased).
DispatchSolution solve_ccopf(const GridCase& grid, const PtdfMatrix& ptdf,
                             const DroopSet& droops, const WindStatistics& wind,
                             double epsilon);

struct PfrOptions {
  int max_iterations = 200;
  double cut_tolerance = 1e-8;
  // Weighted constraints are enforced as E[exp(+-(x - limit)/t) 1{regime}] <= eps
  // with decay scale t = max(std(subject), scale_floor_mw) / sqrt(2 ln(1/eps)).
  double scale_floor_mw = 1e-3;
};

/// Weighted chance-constrained OPF with the dead-zone response: cutting-plane
/// outer approximation over both regimes, generators and lines, both sides.
DispatchSolution solve_ccopf_pfr(const GridCase& grid, const PtdfMatrix& ptdf,
                                 const DroopSet& droops, const WindStatistics& wind,
                                 double epsilon, const Deadband& deadband,
                                 const PfrOptions& options = {});

/// Variance offset sum cost_quad_i * E[(p_i - P_i)^2] under the dead-zone
/// policy (regime-mixture second moments, closed form).
double policy_variance_offset(const GridCase& grid, const DroopSet& droops,
                              const WindStatistics& wind, const Deadband& deadband);

}  // namespace ccopf
