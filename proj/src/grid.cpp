// SPDX-License-Identifier: Apache-2.0
#include "ccopf/grid.hpp"

#include <cmath>
#include <queue>

namespace ccopf {

namespace {

std::string record(const char* section, std::size_t i) {
  return std::string(section) + "[" + std::to_string(i) + "]";
}

}  // namespace

void GridCase::finalize() {
  finalized_ = false;
  index_.clear();
  gen_bus_idx_.clear();
  farm_bus_idx_.clear();

  if (buses.empty()) throw CaseValidationError("case has no buses");
  if (generators.empty()) throw CaseValidationError("case has at least one generator required");

  index_.reserve(buses.size());
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const Bus& bus = buses[i];
    if (!index_.emplace(bus.id, static_cast<int>(i)).second)
      throw CaseValidationError(record("buses", i) + ": duplicate bus id " + std::to_string(bus.id));
    if (bus.load < 0.0 || !std::isfinite(bus.load))
      throw CaseValidationError(record("buses", i) + ": negative load " + std::to_string(bus.load));
  }

  if (!index_.count(slack_bus))
    throw CaseValidationError("slack_bus: references nonexistent bus " + std::to_string(slack_bus));

  auto check_bus_ref = [&](const char* section, std::size_t i, int id) {
    auto it = index_.find(id);
    if (it == index_.end())
      throw CaseValidationError(record(section, i) + ": references nonexistent bus " +
                                std::to_string(id));
    return it->second;
  };

  gen_bus_idx_.reserve(generators.size());
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const Generator& g = generators[i];
    gen_bus_idx_.push_back(check_bus_ref("generators", i, g.bus));
    if (g.p_min < 0.0 || g.p_max < g.p_min)
      throw CaseValidationError(record("generators", i) + ": limits violate 0 <= p_min <= p_max");
    if (g.cost_quad < 0.0)
      throw CaseValidationError(record("generators", i) + ": negative quadratic cost");
    if (g.alpha1 < 0.0 || g.alpha2 < 0.0 || g.gamma < 0.0)
      throw CaseValidationError(record("generators", i) + ": negative droop coefficient");
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& l = lines[i];
    check_bus_ref("lines", i, l.from);
    check_bus_ref("lines", i, l.to);
    if (l.from == l.to)
      throw CaseValidationError(record("lines", i) + ": from == to (" + std::to_string(l.from) + ")");
    if (!(l.susceptance > 0.0))
      throw CaseValidationError(record("lines", i) + ": susceptance must be positive");
    if (!(l.limit > 0.0))
      throw CaseValidationError(record("lines", i) + ": negative or zero limit " +
                                std::to_string(l.limit));
  }

  farm_bus_idx_.reserve(wind_farms.size());
  for (std::size_t i = 0; i < wind_farms.size(); ++i) {
    const WindFarm& w = wind_farms[i];
    farm_bus_idx_.push_back(check_bus_ref("wind_farms", i, w.bus));
    if (w.forecast < 0.0)
      throw CaseValidationError(record("wind_farms", i) + ": negative forecast");
    if (w.stdev < 0.0)
      throw CaseValidationError(record("wind_farms", i) + ": negative stdev");
  }

  // Connectivity over the line graph.
  std::vector<char> seen(buses.size(), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::vector<std::vector<int>> adjacency(buses.size());
  for (const Line& l : lines) {
    int f = index_.at(l.from), t = index_.at(l.to);
    adjacency[f].push_back(t);
    adjacency[t].push_back(f);
  }
  std::size_t reached = 1;
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != buses.size()) {
    for (std::size_t i = 0; i < buses.size(); ++i) {
      if (!seen[i])
        throw CaseValidationError("grid graph is disconnected: bus " +
                                  std::to_string(buses[i].id) + " unreachable from bus " +
                                  std::to_string(buses[0].id));
    }
  }

  finalized_ = true;
}

void GridCase::require_finalized() const {
  if (!finalized_) throw std::logic_error("GridCase used before finalize()");
}

int GridCase::bus_index(int id) const {
  require_finalized();
  auto it = index_.find(id);
  if (it == index_.end())
    throw CaseValidationError("unknown bus id " + std::to_string(id));
  return it->second;
}

double GridCase::total_load() const {
  double sum = 0.0;
  for (const Bus& b : buses) sum += b.load;
  return sum;
}

double GridCase::total_wind_forecast() const {
  double sum = 0.0;
  for (const WindFarm& w : wind_farms) sum += w.forecast;
  return sum;
}

GridCase apply_case_modifiers(const GridCase& base, double line_derate, double load_scale) {
  if (line_derate < 0.0 || line_derate >= 1.0)
    throw std::invalid_argument("line_derate must be in [0, 1)");
  if (!(load_scale > 0.0)) throw std::invalid_argument("load_scale must be positive");

  GridCase out = base;
  for (Line& l : out.lines) l.limit *= (1.0 - line_derate);
  for (Bus& b : out.buses) b.load *= load_scale;
  out.finalize();
  return out;
}

PtdfMatrix build_ptdf(const GridCase& grid) {
  const int n = grid.bus_count();
  const int m = static_cast<int>(grid.lines.size());
  const int slack = grid.slack_index();

  // Susceptance Laplacian.
  Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
  for (const Line& l : grid.lines) {
    const int f = grid.bus_index(l.from);
    const int t = grid.bus_index(l.to);
    laplacian(f, f) += l.susceptance;
    laplacian(t, t) += l.susceptance;
    laplacian(f, t) -= l.susceptance;
    laplacian(t, f) -= l.susceptance;
  }

  // Reduced system without the slack row/column.
  Eigen::MatrixXd reduced(n - 1, n - 1);
  std::vector<int> keep;
  keep.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != slack) keep.push_back(i);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) reduced(i, j) = laplacian(keep[i], keep[j]);

  Eigen::MatrixXd inv_reduced(n - 1, n - 1);
  if (n > 1) {
    Eigen::LDLT<Eigen::MatrixXd> factor(reduced);
    if (factor.info() != Eigen::Success)
      throw CaseValidationError("reduced susceptance matrix is singular (disconnected graph?)");
    inv_reduced = factor.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
    const double residual = (reduced * inv_reduced - Eigen::MatrixXd::Identity(n - 1, n - 1))
                                .cwiseAbs()
                                .maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-6)
      throw CaseValidationError("reduced susceptance matrix is numerically singular");
  }

  // Angle sensitivity with the slack pinned at zero.
  Eigen::MatrixXd theta_sens = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) theta_sens(keep[i], keep[j]) = inv_reduced(i, j);

  PtdfMatrix ptdf;
  ptdf.slack_bus = grid.slack_bus;
  ptdf.entries.resize(m, n);
  for (int l = 0; l < m; ++l) {
    const Line& line = grid.lines[l];
    const int f = grid.bus_index(line.from);
    const int t = grid.bus_index(line.to);
    for (int b = 0; b < n; ++b)
      ptdf.entries(l, b) = line.susceptance * (theta_sens(f, b) - theta_sens(t, b));
  }
  return ptdf;
}

Eigen::VectorXd dc_flows(const PtdfMatrix& ptdf, const Eigen::VectorXd& injections) {
  if (injections.size() != ptdf.entries.cols())
    throw std::invalid_argument("injection vector length does not match bus count");
  const double imbalance = injections.sum();
  if (std::abs(imbalance) > 1e-6)
    throw std::invalid_argument("injections do not balance: residual " +
                                std::to_string(imbalance) + " MW");
  return ptdf.entries * injections;
}

}  // namespace ccopf
