// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccopf/grid.hpp"
#include "ccopf/policy.hpp"
#include "ccopf/solver.hpp"
#include "ccopf/uncertainty.hpp"

namespace ccopf {

/// n x farms matrix of wind realizations. Reproducible: the draw for
/// (scenario, farm) depends only on (seed, scenario, farm).
struct ScenarioSet {
  Eigen::MatrixXd samples;
  std::uint64_t seed = 0;
  std::int64_t count() const { return samples.rows(); }
};

/// Independent Gaussian draws per farm (inverse-CDF over a counter-based
/// generator, so results do not depend on thread count).
ScenarioSet sample_wind(const WindStatistics& wind, std::int64_t n, std::uint64_t seed);

struct ValidationReport {
  std::vector<double> gen_upper_rate;
  std::vector<double> gen_lower_rate;
  std::vector<double> line_upper_rate;
  std::vector<double> line_lower_rate;
  double gen_violation_rate = 0.0;     // any generator limit violated
  double line_violation_rate = 0.0;    // any line limit violated
  double system_violation_rate = 0.0;  // any constraint violated
  double cost_mean = 0.0;
  double cost_std = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t case_hash = 0;  // set by the I/O layer
  double epsilon = 0.0;         // carried over from the solution
  std::string label;
};

struct ValidateOptions {
  int threads = 0;                 // 0: CCOPF_THREADS env var, else hardware
  bool truncate_negative = false;  // clip negative wind realizations at zero
  DeadbandTrigger trigger = DeadbandTrigger::WithPrimaryEquilibrium;
};

/// Replays the exact dead-zone response for every scenario and counts
/// violations of the physical limits (1e-6 MW tolerance). Costs are evaluated
/// at realized outputs. Bit-reproducible for a fixed (solution, scenarios).
ValidationReport validate(const DispatchSolution& solution, const GridCase& grid,
                          const PtdfMatrix& ptdf, const DroopSet& droops,
                          const Deadband& deadband, const ScenarioSet& scenarios,
                          const ValidateOptions& options = {});

struct ComparisonRow {
  std::string label;
  double epsilon = 0.0;
  double objective = 0.0;
  double gap_pct = 0.0;  // vs the first label's row at the same epsilon
  double cost_mean = 0.0;
  double cost_std = 0.0;
  double gen_violation_rate = 0.0;
  double line_violation_rate = 0.0;
  double sys_violation_rate = 0.0;
  double solve_seconds = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

struct LabeledRun {
  std::string label;
  ValidationReport report;
  DispatchSolution solution;
};

/// Tabulates objective, gap vs the first label, cost statistics, violation
/// rates and solve time. Throws std::invalid_argument when the runs mix case
/// hashes or scenario seeds.
ComparisonTable compare(const std::vector<LabeledRun>& runs);

/// CSV with the fixed header row:
/// label,epsilon,objective,gap_pct,cost_mean,cost_std,sys_violation_rate,solve_seconds
std::string comparison_csv(const ComparisonTable& table, bool zero_timing = false);

/// Plot-data CSV (epsilon vs cost mean/std and violation rates per label),
/// enough to redraw the cost and violation figures.
std::string plot_csv(const ComparisonTable& table);

}  // namespace ccopf
