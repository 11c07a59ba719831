// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ccopf {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CaseValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bus {
  int id = 0;
  double load = 0.0;  // MW, >= 0
};

struct Generator {
  int bus = 0;
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW
  double cost_quad = 0.0;   // $/MW^2
  double cost_lin = 0.0;    // $/MW
  double cost_const = 0.0;  // $
  double alpha1 = 0.0;  // primary droop participation
  double alpha2 = 0.0;  // secondary droop participation
  double gamma = 0.0;   // natural damping, MW per frequency unit

  double cost(double p) const { return (cost_quad * p + cost_lin) * p + cost_const; }
  double marginal_cost(double p) const { return 2.0 * cost_quad * p + cost_lin; }
};

struct Line {
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // per-unit, > 0
  double limit = 0.0;        // MW, > 0; flow positive from->to
};

struct WindFarm {
  int bus = 0;
  double forecast = 0.0;  // mean output, MW
  double stdev = 0.0;     // MW
};

/// Immutable problem instance. Call finalize() after filling the public
/// collections; it validates every invariant and builds the id lookup.
class GridCase {
 public:
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  std::vector<WindFarm> wind_farms;
  int slack_bus = 0;

  // Validates invariants (unique bus ids, referenced ids exist, connected
  // graph, sign constraints) and caches contiguous indices. Throws
  // CaseValidationError naming the offending record.
  void finalize();
  bool finalized() const { return finalized_; }

  int bus_count() const { return static_cast<int>(buses.size()); }
  int bus_index(int id) const;
  int slack_index() const { return bus_index(slack_bus); }
  const std::vector<int>& generator_bus_indices() const { return gen_bus_idx_; }
  const std::vector<int>& farm_bus_indices() const { return farm_bus_idx_; }

  double total_load() const;
  double total_wind_forecast() const;

 private:
  void require_finalized() const;
  std::unordered_map<int, int> index_;
  std::vector<int> gen_bus_idx_;
  std::vector<int> farm_bus_idx_;
  bool finalized_ = false;
};

/// New case with every line limit scaled by (1 - line_derate) and every bus
/// load scaled by load_scale. Requires 0 <= line_derate < 1 and load_scale > 0.
GridCase apply_case_modifiers(const GridCase& base, double line_derate, double load_scale);

/// Line-by-bus matrix of DC flow sensitivities. entries(l, b) is the MW flow
/// change on line l per MW injected at bus b and withdrawn at the slack.
/// The slack column is identically zero.
struct PtdfMatrix {
  Eigen::MatrixXd entries;
  int slack_bus = 0;
};

/// Dense factorization of the reduced susceptance matrix. Throws
/// CaseValidationError on a singular reduction (disconnected graph).
PtdfMatrix build_ptdf(const GridCase& grid);

/// flows = ptdf * injections. Injections must sum to zero within 1e-6 MW.
Eigen::VectorXd dc_flows(const PtdfMatrix& ptdf, const Eigen::VectorXd& injections);

}  // namespace ccopf
