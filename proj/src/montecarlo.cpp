// SPDX-License-Identifier: Apache-2.0
#include "ccopf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "ccopf/rng.hpp"

namespace ccopf {

ScenarioSet sample_wind(const WindStatistics& wind, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  const int farms = wind.size();
  ScenarioSet set;
  set.seed = seed;
  set.samples.resize(n, farms);
  for (std::int64_t k = 0; k < n; ++k)
    for (int w = 0; w < farms; ++w) {
      const double sd = std::sqrt(wind.variances[w]);
      set.samples(k, w) =
          wind.means[w] +
          (sd > 0.0 ? sd * normal_draw(seed, static_cast<std::uint64_t>(k) * farms + w) : 0.0);
    }
  return set;
}

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CCOPF_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return std::min(v, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(std::min(hw, 16u)) : 1;
}

constexpr std::int64_t kChunk = 4096;  // fixed chunk size keeps reductions thread-count independent
constexpr double kViolationTol = 1e-6;  // MW

struct ChunkStats {
  std::vector<std::int64_t> gen_upper, gen_lower, line_upper, line_lower;
  std::int64_t any_gen = 0, any_line = 0, any = 0;
  // Welford accumulators for realized cost.
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void init(int n_gen, int n_line) {
    gen_upper.assign(n_gen, 0);
    gen_lower.assign(n_gen, 0);
    line_upper.assign(n_line, 0);
    line_lower.assign(n_line, 0);
  }
  void add_cost(double cost) {
    ++count;
    const double delta = cost - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (cost - mean);
  }
  void merge(const ChunkStats& other) {
    for (std::size_t i = 0; i < gen_upper.size(); ++i) {
      gen_upper[i] += other.gen_upper[i];
      gen_lower[i] += other.gen_lower[i];
    }
    for (std::size_t l = 0; l < line_upper.size(); ++l) {
      line_upper[l] += other.line_upper[l];
      line_lower[l] += other.line_lower[l];
    }
    any_gen += other.any_gen;
    any_line += other.any_line;
    any += other.any;
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double delta = other.mean - mean;
    const std::int64_t total = count + other.count;
    mean += delta * static_cast<double>(other.count) / static_cast<double>(total);
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / static_cast<double>(total);
    count = total;
  }
};

}  // namespace

ValidationReport validate(const DispatchSolution& solution, const GridCase& grid,
                          const PtdfMatrix& ptdf, const DroopSet& droops,
                          const Deadband& deadband, const ScenarioSet& scenarios,
                          const ValidateOptions& options) {
  if (solution.status != SolveStatus::Optimal)
    throw std::invalid_argument("validate requires an optimal solution");
  const int n_gen = static_cast<int>(grid.generators.size());
  const int n_line = static_cast<int>(grid.lines.size());
  const int farms = static_cast<int>(grid.wind_farms.size());
  if (static_cast<int>(solution.p0.size()) != n_gen)
    throw std::invalid_argument("solution dispatch length does not match case");
  if (scenarios.samples.cols() != farms)
    throw std::invalid_argument("scenario farm count does not match case");

  const std::int64_t n = scenarios.count();
  const double boundary = regime_boundary_mw(droops, deadband, options.trigger);
  const std::vector<double> share0 = renormalized_droop(droops, 0);
  const std::vector<double> share1 = renormalized_droop(droops, 1);

  // Scheduled flows and per-farm / response sensitivities.
  const auto& gen_bus = grid.generator_bus_indices();
  const auto& farm_bus = grid.farm_bus_indices();
  Eigen::VectorXd scheduled = Eigen::VectorXd::Zero(grid.bus_count());
  for (int i = 0; i < n_gen; ++i) scheduled(gen_bus[i]) += solution.p0[i];
  for (int w = 0; w < farms; ++w) scheduled(farm_bus[w]) += grid.wind_farms[w].forecast;
  for (int b = 0; b < grid.bus_count(); ++b) scheduled(b) -= grid.buses[b].load;
  const Eigen::VectorXd flow_base = ptdf.entries * scheduled;

  Eigen::MatrixXd farm_cols(n_line, farms);
  for (int w = 0; w < farms; ++w) farm_cols.col(w) = ptdf.entries.col(farm_bus[w]);
  Eigen::VectorXd resp0 = Eigen::VectorXd::Zero(n_line);
  Eigen::VectorXd resp1 = Eigen::VectorXd::Zero(n_line);
  for (int i = 0; i < n_gen; ++i) {
    resp0 += share0[i] * ptdf.entries.col(gen_bus[i]);
    resp1 += share1[i] * ptdf.entries.col(gen_bus[i]);
  }

  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkStats> chunk_stats(n_chunks);

  auto run_chunk = [&](std::int64_t chunk) {
    ChunkStats& st = chunk_stats[chunk];
    st.init(n_gen, n_line);
    const std::int64_t begin = chunk * kChunk;
    const std::int64_t end = std::min(n, begin + kChunk);
    Eigen::VectorXd dev(farms);
    for (std::int64_t k = begin; k < end; ++k) {
      double total = 0.0;
      for (int w = 0; w < farms; ++w) {
        double realized = scenarios.samples(k, w);
        if (options.truncate_negative && realized < 0.0) realized = 0.0;
        dev(w) = realized - grid.wind_farms[w].forecast;
        total += dev(w);
      }
      const int regime = std::abs(total) > boundary ? 1 : 0;
      const std::vector<double>& share = regime == 1 ? share1 : share0;

      bool gen_bad = false;
      double cost = 0.0;
      for (int i = 0; i < n_gen; ++i) {
        const double p = solution.p0[i] - share[i] * total;
        const Generator& g = grid.generators[i];
        cost += g.cost(p);
        if (p > g.p_max + kViolationTol) {
          ++st.gen_upper[i];
          gen_bad = true;
        }
        if (p < g.p_min - kViolationTol) {
          ++st.gen_lower[i];
          gen_bad = true;
        }
      }
      st.add_cost(cost);

      bool line_bad = false;
      const Eigen::VectorXd& resp = regime == 1 ? resp1 : resp0;
      for (int l = 0; l < n_line; ++l) {
        const double flow = flow_base(l) + farm_cols.row(l).dot(dev) - resp(l) * total;
        const double limit = grid.lines[l].limit;
        if (flow > limit + kViolationTol) {
          ++st.line_upper[l];
          line_bad = true;
        }
        if (flow < -limit - kViolationTol) {
          ++st.line_lower[l];
          line_bad = true;
        }
      }
      if (gen_bad) ++st.any_gen;
      if (line_bad) ++st.any_line;
      if (gen_bad || line_bad) ++st.any;
    }
  };

  const int threads = std::min<std::int64_t>(resolve_threads(options.threads), n_chunks);
  if (threads <= 1) {
    for (std::int64_t chunk = 0; chunk < n_chunks; ++chunk) run_chunk(chunk);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::int64_t chunk = t; chunk < n_chunks; chunk += threads) run_chunk(chunk);
      });
    for (std::thread& th : pool) th.join();
  }

  // Merge in chunk order: results do not depend on the thread count.
  ChunkStats total_stats;
  total_stats.init(n_gen, n_line);
  for (const ChunkStats& st : chunk_stats) total_stats.merge(st);

  ValidationReport report;
  report.samples = n;
  report.seed = scenarios.seed;
  report.epsilon = solution.epsilon;
  report.case_hash = solution.case_hash;
  const double dn = static_cast<double>(n);
  report.gen_upper_rate.resize(n_gen);
  report.gen_lower_rate.resize(n_gen);
  for (int i = 0; i < n_gen; ++i) {
    report.gen_upper_rate[i] = total_stats.gen_upper[i] / dn;
    report.gen_lower_rate[i] = total_stats.gen_lower[i] / dn;
  }
  report.line_upper_rate.resize(n_line);
  report.line_lower_rate.resize(n_line);
  for (int l = 0; l < n_line; ++l) {
    report.line_upper_rate[l] = total_stats.line_upper[l] / dn;
    report.line_lower_rate[l] = total_stats.line_lower[l] / dn;
  }
  report.gen_violation_rate = total_stats.any_gen / dn;
  report.line_violation_rate = total_stats.any_line / dn;
  report.system_violation_rate = total_stats.any / dn;
  report.cost_mean = total_stats.mean;
  report.cost_std = n > 1 ? std::sqrt(total_stats.m2 / static_cast<double>(n - 1)) : 0.0;
  return report;
}

ComparisonTable compare(const std::vector<LabeledRun>& runs) {
  if (runs.size() < 2) throw std::invalid_argument("compare requires at least two runs");
  for (const LabeledRun& run : runs) {
    if (run.report.seed != runs.front().report.seed ||
        run.report.samples != runs.front().report.samples)
      throw std::invalid_argument("compare: mismatched scenario seeds between runs");
    if (run.solution.case_hash != runs.front().solution.case_hash)
      throw std::invalid_argument("compare: mismatched case hashes between runs");
  }

  const std::string& base_label = runs.front().label;
  ComparisonTable table;
  for (const LabeledRun& run : runs) {
    ComparisonRow row;
    row.label = run.label;
    row.epsilon = run.solution.epsilon;
    row.objective = run.solution.objective;
    row.cost_mean = run.report.cost_mean;
    row.cost_std = run.report.cost_std;
    row.gen_violation_rate = run.report.gen_violation_rate;
    row.line_violation_rate = run.report.line_violation_rate;
    row.sys_violation_rate = run.report.system_violation_rate;
    row.solve_seconds = run.solution.solve_seconds;

    row.gap_pct = 0.0;
    for (const LabeledRun& ref : runs) {
      if (ref.label == base_label && ref.solution.epsilon == run.solution.epsilon) {
        if (ref.solution.objective != 0.0)
          row.gap_pct = 100.0 * (run.solution.objective - ref.solution.objective) /
                        ref.solution.objective;
        break;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

namespace {

std::string format_row(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

std::string comparison_csv(const ComparisonTable& table, bool zero_timing) {
  std::string out =
      "label,epsilon,objective,gap_pct,cost_mean,cost_std,sys_violation_rate,solve_seconds\n";
  for (const ComparisonRow& r : table.rows)
    out += format_row("%s,%.10g,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f\n", r.label.c_str(), r.epsilon,
                      r.objective, r.gap_pct, r.cost_mean, r.cost_std, r.sys_violation_rate,
                      zero_timing ? 0.0 : r.solve_seconds);
  return out;
}

std::string plot_csv(const ComparisonTable& table) {
  std::string out =
      "label,epsilon,cost_mean,cost_std,gen_violation_rate,line_violation_rate,"
      "sys_violation_rate\n";
  for (const ComparisonRow& r : table.rows)
    out += format_row("%s,%.10g,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.label.c_str(), r.epsilon,
                      r.cost_mean, r.cost_std, r.gen_violation_rate, r.line_violation_rate,
                      r.sys_violation_rate);
  return out;
}

}  // namespace ccopf
