// SPDX-License-Identifier: Apache-2.0
#include "ccopf/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace ccopf {

std::string formulation_name(Formulation f) {
  switch (f) {
    case Formulation::Dcopf: return "dcopf";
    case Formulation::Ccopf: return "ccopf";
    case Formulation::CcopfPfr: return "ccopf-pfr";
  }
  return "?";
}

Formulation formulation_from_name(const std::string& name) {
  if (name == "dcopf") return Formulation::Dcopf;
  if (name == "ccopf") return Formulation::Ccopf;
  if (name == "ccopf-pfr") return Formulation::CcopfPfr;
  throw std::invalid_argument("unknown formulation: " + name);
}

std::string solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct MeanFlowMap {
  Eigen::MatrixXd gen_cols;   // lines x generators: d flow / d p0_g
  Eigen::VectorXd base;       // flow mean at p0 = 0
};

// Flow mean is affine in p0: flow = gen_cols * p0 + base. `net_wind` holds the
// per-farm scheduled-plus-fluctuation means; the generator response to a
// nonzero fluctuation mean is folded into `base`.
MeanFlowMap mean_flow_map(const GridCase& grid, const PtdfMatrix& ptdf,
                          const std::vector<double>& share, double fluct_mean,
                          const std::vector<double>& net_wind) {
  const int n_line = static_cast<int>(grid.lines.size());
  const int n_gen = static_cast<int>(grid.generators.size());
  const auto& gen_bus = grid.generator_bus_indices();
  const auto& farm_bus = grid.farm_bus_indices();

  MeanFlowMap map;
  map.gen_cols.resize(n_line, n_gen);
  for (int g = 0; g < n_gen; ++g) map.gen_cols.col(g) = ptdf.entries.col(gen_bus[g]);

  Eigen::VectorXd inj = Eigen::VectorXd::Zero(grid.bus_count());
  for (std::size_t w = 0; w < grid.wind_farms.size(); ++w) inj(farm_bus[w]) += net_wind[w];
  for (int b = 0; b < grid.bus_count(); ++b) inj(b) -= grid.buses[b].load;
  map.base = ptdf.entries * inj;
  if (fluct_mean != 0.0)
    for (int g = 0; g < n_gen; ++g) map.base -= share[g] * fluct_mean * map.gen_cols.col(g);
  return map;
}

SolveStatus map_qp_status(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return SolveStatus::Optimal;
    case QpStatus::Infeasible: return SolveStatus::Infeasible;
    case QpStatus::IterationLimit: return SolveStatus::IterationLimit;
    case QpStatus::NumericalFailure: return SolveStatus::IterationLimit;
  }
  return SolveStatus::Infeasible;
}

double truncated_second_moment(double mean, double var, double a, double b) {
  if (!(var > 0.0)) {
    const double inside = (mean >= a && mean <= b) ? 1.0 : 0.0;
    return inside * mean * mean;
  }
  const double sd = std::sqrt(var);
  const double alpha = (a - mean) / sd;
  const double beta = (b - mean) / sd;
  const double prob = gaussian_cdf(beta) - gaussian_cdf(alpha);
  const double pdf_a = gaussian_pdf(alpha);
  const double pdf_b = gaussian_pdf(beta);
  return mean * mean * prob + 2.0 * mean * sd * (pdf_a - pdf_b) +
         var * (prob - (beta * pdf_b - alpha * pdf_a));
}

}  // namespace

double policy_variance_offset(const GridCase& grid, const DroopSet& droops,
                              const WindStatistics& wind, const Deadband& deadband) {
  const auto [mean, var] = aggregate_wind(wind);
  if (!(var > 0.0) && mean == 0.0) return 0.0;
  const double inside = truncated_second_moment(mean, var, -deadband.threshold_mw,
                                                deadband.threshold_mw);
  const double total = mean * mean + var;
  const double outside = std::max(0.0, total - inside);
  const std::vector<double> share0 = renormalized_droop(droops, 0);
  const std::vector<double> share1 = renormalized_droop(droops, 1);
  double offset = 0.0;
  for (std::size_t i = 0; i < grid.generators.size(); ++i)
    offset += grid.generators[i].cost_quad *
              (share0[i] * share0[i] * inside + share1[i] * share1[i] * outside);
  return offset;
}

namespace {

// Shared base problem: quadratic cost, balance row, generator bound rows.
struct BaseProblem {
  QpProblem qp;
  int n_gen = 0;
  double balance_rhs = 0.0;
};

BaseProblem base_problem(const GridCase& grid, double scheduled_wind) {
  const int n = static_cast<int>(grid.generators.size());
  BaseProblem base;
  base.n_gen = n;
  base.qp.q_diag.resize(n);
  base.qp.c.resize(n);
  base.qp.c0 = 0.0;
  for (int i = 0; i < n; ++i) {
    base.qp.q_diag(i) = 2.0 * grid.generators[i].cost_quad;
    base.qp.c(i) = grid.generators[i].cost_lin;
    base.qp.c0 += grid.generators[i].cost_const;
  }
  base.balance_rhs = grid.total_load() - scheduled_wind;
  base.qp.A = Eigen::MatrixXd::Ones(1, n);
  base.qp.b = Eigen::VectorXd::Constant(1, base.balance_rhs);
  return base;
}

void append_rows(QpProblem& qp, const Eigen::MatrixXd& rows, const Eigen::VectorXd& rhs) {
  const int old_rows = static_cast<int>(qp.G.rows());
  const int n = static_cast<int>(qp.c.size());
  qp.G.conservativeResize(old_rows + rows.rows(), n);
  qp.G.bottomRows(rows.rows()) = rows;
  qp.h.conservativeResize(old_rows + rhs.size());
  qp.h.tail(rhs.size()) = rhs;
}

void append_bounds(QpProblem& qp, const std::vector<double>& lower,
                   const std::vector<double>& upper) {
  const int n = static_cast<int>(lower.size());
  Eigen::MatrixXd rows(2 * n, n);
  Eigen::VectorXd rhs(2 * n);
  rows.setZero();
  for (int i = 0; i < n; ++i) {
    rows(i, i) = 1.0;
    rhs(i) = upper[i];
    rows(n + i, i) = -1.0;
    rhs(n + i) = -lower[i];
  }
  append_rows(qp, rows, rhs);
}

void append_line_rows(QpProblem& qp, const MeanFlowMap& map, const std::vector<double>& margin,
                      const GridCase& grid) {
  const int n_line = static_cast<int>(grid.lines.size());
  const int n = static_cast<int>(qp.c.size());
  Eigen::MatrixXd rows(2 * n_line, n);
  Eigen::VectorXd rhs(2 * n_line);
  for (int l = 0; l < n_line; ++l) {
    const double cap = grid.lines[l].limit - margin[l];
    rows.row(l) = map.gen_cols.row(l);
    rhs(l) = cap - map.base(l);
    rows.row(n_line + l) = -map.gen_cols.row(l);
    rhs(n_line + l) = cap + map.base(l);
  }
  append_rows(qp, rows, rhs);
}

bool balance_attainable(const GridCase& grid, const std::vector<double>& lower,
                        const std::vector<double>& upper, double rhs, std::string* detail) {
  const double lo = std::accumulate(lower.begin(), lower.end(), 0.0);
  const double hi = std::accumulate(upper.begin(), upper.end(), 0.0);
  (void)grid;
  if (rhs < lo - 1e-9 || rhs > hi + 1e-9) {
    *detail = "balance " + std::to_string(rhs) + " MW outside attainable range [" +
              std::to_string(lo) + ", " + std::to_string(hi) + "]";
    return false;
  }
  return true;
}

DispatchSolution finish_from_qp(const GridCase& grid, const QpSolution& qp_sol,
                                Formulation formulation, double variance_offset) {
  DispatchSolution out;
  out.formulation = formulation;
  out.status = map_qp_status(qp_sol.status);
  out.iterations = 1;
  out.qp_iterations = qp_sol.iterations;
  out.variance_offset = variance_offset;
  if (qp_sol.status == QpStatus::Optimal) {
    out.p0.assign(qp_sol.x.data(), qp_sol.x.data() + qp_sol.x.size());
    out.setpoint_cost = 0.0;
    for (std::size_t i = 0; i < out.p0.size(); ++i)
      out.setpoint_cost += grid.generators[i].cost(out.p0[i]);
    out.objective = out.setpoint_cost + variance_offset;
  } else {
    out.detail = "qp status: " + qp_status_name(qp_sol.status);
  }
  return out;
}

}  // namespace

DispatchSolution solve_dcopf(const GridCase& grid, const PtdfMatrix& ptdf) {
  Timer timer;
  BaseProblem base = base_problem(grid, grid.total_wind_forecast());

  std::vector<double> lower, upper, net_wind;
  for (const Generator& g : grid.generators) {
    lower.push_back(g.p_min);
    upper.push_back(g.p_max);
  }
  for (const WindFarm& w : grid.wind_farms) net_wind.push_back(w.forecast);

  DispatchSolution out;
  out.formulation = Formulation::Dcopf;
  std::string detail;
  if (!balance_attainable(grid, lower, upper, base.balance_rhs, &detail)) {
    out.status = SolveStatus::Infeasible;
    out.detail = detail;
    return out;
  }

  append_bounds(base.qp, lower, upper);
  const std::vector<double> no_share(grid.generators.size(), 0.0);
  MeanFlowMap map = mean_flow_map(grid, ptdf, no_share, 0.0, net_wind);
  append_line_rows(base.qp, map, std::vector<double>(grid.lines.size(), 0.0), grid);

  QpSolution qp_sol = solve_qp(base.qp);
  out = finish_from_qp(grid, qp_sol, Formulation::Dcopf, 0.0);
  out.solve_seconds = timer.seconds();
  return out;
}

DispatchSolution solve_ccopf(const GridCase& grid, const PtdfMatrix& ptdf,
                             const DroopSet& droops, const WindStatistics& wind,
                             double epsilon) {
  Timer timer;
  droops.validate();
  const auto [fluct_mean, fluct_var] = aggregate_wind(wind);
  const std::vector<double> share = renormalized_droop(droops, 1);

  DispatchSolution out;
  out.formulation = Formulation::Ccopf;
  out.epsilon = epsilon;

  TightenedLimits limits = analytic_cc_tightening(grid, ptdf, droops, wind, epsilon);
  if (!limits.feasible) {
    out.status = SolveStatus::Infeasible;
    out.detail = limits.infeasible_detail;
    out.solve_seconds = timer.seconds();
    return out;
  }

  // The tightened limits constrain the mean output P_i = p0_i - share_i * m;
  // shift them back onto the set points.
  const int n = static_cast<int>(grid.generators.size());
  std::vector<double> lower(n), upper(n), net_wind;
  for (int i = 0; i < n; ++i) {
    lower[i] = limits.gen_lower[i] + share[i] * fluct_mean;
    upper[i] = limits.gen_upper[i] + share[i] * fluct_mean;
  }
  for (std::size_t w = 0; w < grid.wind_farms.size(); ++w)
    net_wind.push_back(grid.wind_farms[w].forecast + wind.means[w]);

  BaseProblem base = base_problem(grid, grid.total_wind_forecast() + fluct_mean);
  std::string detail;
  if (!balance_attainable(grid, lower, upper, base.balance_rhs, &detail)) {
    out.status = SolveStatus::Infeasible;
    out.detail = detail;
    out.solve_seconds = timer.seconds();
    return out;
  }
  append_bounds(base.qp, lower, upper);
  MeanFlowMap map = mean_flow_map(grid, ptdf, share, fluct_mean, net_wind);
  append_line_rows(base.qp, map, limits.line_margin, grid);

  double offset = 0.0;
  for (int i = 0; i < n; ++i)
    offset += grid.generators[i].cost_quad * share[i] * share[i] * fluct_var;

  QpSolution qp_sol = solve_qp(base.qp);
  out = finish_from_qp(grid, qp_sol, Formulation::Ccopf, offset);
  out.epsilon = epsilon;
  out.solve_seconds = timer.seconds();
  return out;
}

namespace {

struct WeightedConstraint {
  ConstraintSpec spec;
  double limit = 0.0;   // weight centering point
  double scale = 0.0;   // decay scale t
};

double log_gaussian_cdf(double x) {
  if (x >= -8.0) return std::log(gaussian_cdf(x));
  // Upper-tail asymptotic of the Mills ratio.
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * M_PI) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// log(Phi(hi) - Phi(lo)) for hi > lo, stable in both tails.
double log_gaussian_prob(double lo, double hi) {
  if (hi <= lo) return -std::numeric_limits<double>::infinity();
  double la, lb;
  if (hi <= 0.0) {
    la = log_gaussian_cdf(lo);
    lb = log_gaussian_cdf(hi);
  } else if (lo >= 0.0) {
    la = log_gaussian_cdf(-hi);
    lb = log_gaussian_cdf(-lo);
  } else {
    return std::log(gaussian_cdf(hi) - gaussian_cdf(lo));
  }
  const double d = la - lb;
  if (d > -1e-15) return -std::numeric_limits<double>::infinity();
  return lb + std::log1p(-std::exp(d));
}

struct SubjectGeometry {
  double signed_dev = 0.0;    // dir * slope * sd_s: exp-weight exposure per unit Z
  double residual_var = 0.0;  // conditional variance off the imbalance axis
  double z_lo = 0.0, z_hi = 0.0;  // dead-zone boundaries in Z units
  bool has_fluct = false;
};

// log of E[exp(b Z) 1{regime event}] with b = signed_dev / t.
double log_event_weight(const SubjectGeometry& g, int regime, double b) {
  double lp;
  if (regime == 0) {
    lp = log_gaussian_prob(g.z_lo - b, g.z_hi - b);
  } else {
    const double left = log_gaussian_cdf(g.z_lo - b);
    const double right = log_gaussian_cdf(-(g.z_hi - b));
    const double m = std::max(left, right);
    lp = std::isinf(m) ? m : m + std::log(std::exp(left - m) + std::exp(right - m));
  }
  return 0.5 * b * b + lp;
}

// Margin the weighted bound demands of the subject mean at scale t.
double required_margin(const SubjectGeometry& g, int regime, double epsilon, double t) {
  const double ln_e = log_event_weight(g, regime, g.signed_dev / t);
  if (std::isinf(ln_e)) return -std::numeric_limits<double>::infinity();
  return g.residual_var / (2.0 * t) + t * (ln_e - std::log(epsilon));
}

// Decay scale calibration. The weighted bound at scale t demands the mean
// margin required_margin(t), a U-shaped (or eventually decreasing, when the
// regime event's probability already satisfies epsilon) function of t whose
// minimum is the Chernoff bound for this constraint. The scale is chosen so
// the implied margin sits at sd * (z_{1-eps} + premium(eps)): a uniform
// safety premium over the exact Gaussian quantile margin that decays as the
// tolerance tightens, where the exponential surrogate approaches the exact
// bound. Root-solved on the soft (large-t) side; if the target is below the
// Chernoff floor the floor is used instead. Data-only either way, so the
// constraints stay convex in the dispatch.
double margin_premium(double epsilon) {
  const double l = std::max(std::log(1.0 / epsilon), 0.125);
  return 0.5 + 0.9 / std::sqrt(2.0 * l);
}

double calibrated_weight_scale(const SubjectGeometry& g, int regime, double epsilon,
                               double scale_floor) {
  const double spread =
      std::sqrt(g.signed_dev * g.signed_dev + std::max(g.residual_var, 0.0));
  if (!g.has_fluct || !(spread > 0.0)) return std::max(scale_floor, 1e-9);

  const double z = gaussian_quantile(1.0 - std::min(epsilon, 1.0 - 1e-12));
  const double target = spread * (std::max(z, 0.0) + margin_premium(epsilon));

  const double t_min = std::max(spread / 40.0, 1e-12);
  const double t_max = 400.0 * spread;
  const int grid_points = 200;
  const double ratio = std::pow(t_max / t_min, 1.0 / grid_points);

  // Largest-t bracket where the required margin crosses the target from
  // above; beyond it the weight is softer than needed.
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double best_t = spread;
  double best_m = std::numeric_limits<double>::infinity();
  double prev_t = t_min;
  double prev_m = required_margin(g, regime, epsilon, t_min);
  for (int k = 1; k <= grid_points; ++k) {
    const double t = t_min * std::pow(ratio, k);
    const double m = required_margin(g, regime, epsilon, t);
    if (std::isinf(m) && m < 0.0) return std::max(spread, scale_floor);  // event-free
    if (m < best_m) {
      best_m = m;
      best_t = t;
    }
    if (prev_m >= target && m < target) {
      bracket_lo = prev_t;
      bracket_hi = t;
    }
    prev_t = t;
    prev_m = m;
  }
  if (bracket_lo == 0.0) {
    // Target unreachable; fall back to the Chernoff-optimal scale.
    return std::max(best_t, std::max(scale_floor, 1e-9));
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(bracket_lo * bracket_hi);
    if (required_margin(g, regime, epsilon, mid) >= target)
      bracket_lo = mid;
    else
      bracket_hi = mid;
  }
  return std::max(std::sqrt(bracket_lo * bracket_hi), std::max(scale_floor, 1e-9));
}

SubjectGeometry subject_geometry(const RegimeMoments& m, const RegimeMoments::Conditional& c,
                                 bool upper_side, double boundary) {
  SubjectGeometry g;
  g.residual_var = c.residual_var;
  if (m.imbalance_var > 0.0) {
    const double sd_s = std::sqrt(m.imbalance_var);
    g.signed_dev = (upper_side ? 1.0 : -1.0) * c.slope * sd_s;
    g.z_lo = (-boundary - m.imbalance_mean) / sd_s;
    g.z_hi = (boundary - m.imbalance_mean) / sd_s;
    g.has_fluct = true;
  }
  return g;
}

std::vector<WeightedConstraint> enumerate_constraints(const GridCase& grid,
                                                      const RegimeMoments& m0,
                                                      const RegimeMoments& m1,
                                                      double epsilon, const Deadband& deadband,
                                                      double scale_floor) {
  std::vector<WeightedConstraint> out;
  const int n_gen = static_cast<int>(grid.generators.size());
  const int n_line = static_cast<int>(grid.lines.size());
  const double boundary = deadband.threshold_mw;

  for (int regime = 0; regime <= 1; ++regime) {
    const RegimeMoments& m = regime == 0 ? m0 : m1;
    for (int i = 0; i < n_gen; ++i) {
      const RegimeMoments::Conditional c = m.generator_conditional(i);
      for (bool upper : {true, false}) {
        const SubjectGeometry g = subject_geometry(m, c, upper, boundary);
        const double t = calibrated_weight_scale(g, regime, epsilon, scale_floor);
        out.push_back({{upper ? ConstraintSubject::GeneratorUpper
                              : ConstraintSubject::GeneratorLower,
                        i, regime, epsilon},
                       upper ? grid.generators[i].p_max : grid.generators[i].p_min, t});
      }
    }
    for (int l = 0; l < n_line; ++l) {
      const RegimeMoments::Conditional c = m.line_conditional(l);
      for (bool upper : {true, false}) {
        const SubjectGeometry g = subject_geometry(m, c, upper, boundary);
        const double t = calibrated_weight_scale(g, regime, epsilon, scale_floor);
        out.push_back({{upper ? ConstraintSubject::LineUpper : ConstraintSubject::LineLower,
                        l, regime, epsilon},
                       upper ? grid.lines[l].limit : -grid.lines[l].limit, t});
      }
    }
  }
  return out;
}

}  // namespace

DispatchSolution solve_ccopf_pfr(const GridCase& grid, const PtdfMatrix& ptdf,
                                 const DroopSet& droops, const WindStatistics& wind,
                                 double epsilon, const Deadband& deadband,
                                 const PfrOptions& options) {
  Timer timer;
  droops.validate();
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");

  const int n = static_cast<int>(grid.generators.size());
  const auto [fluct_mean, fluct_var] = aggregate_wind(wind);
  (void)fluct_var;

  DispatchSolution out;
  out.formulation = Formulation::CcopfPfr;
  out.epsilon = epsilon;
  out.deadband_mw = deadband.threshold_mw;

  std::vector<double> lower, upper, net_wind;
  for (const Generator& g : grid.generators) {
    lower.push_back(g.p_min);
    upper.push_back(g.p_max);
  }
  for (std::size_t w = 0; w < grid.wind_farms.size(); ++w)
    net_wind.push_back(grid.wind_farms[w].forecast + wind.means[w]);

  BaseProblem base = base_problem(grid, grid.total_wind_forecast() + fluct_mean);
  std::string detail;
  if (!balance_attainable(grid, lower, upper, base.balance_rhs, &detail)) {
    out.status = SolveStatus::Infeasible;
    out.detail = detail;
    out.solve_seconds = timer.seconds();
    return out;
  }
  append_bounds(base.qp, lower, upper);
  // Physical line limits on the mean flow keep early iterates bounded; the
  // weighted cuts tighten from there. Both regimes share one mean map when the
  // fluctuation mean is zero; regime 1 is used otherwise (primary active).
  const std::vector<double> share1 = renormalized_droop(droops, 1);
  MeanFlowMap map = mean_flow_map(grid, ptdf, share1, fluct_mean, net_wind);
  append_line_rows(base.qp, map, std::vector<double>(grid.lines.size(), 0.0), grid);

  const std::vector<double> zeros(n, 0.0);
  const RegimeMoments var_m0 = sigma_moments(grid, ptdf, droops, zeros, wind, 0);
  const RegimeMoments var_m1 = sigma_moments(grid, ptdf, droops, zeros, wind, 1);
  const std::vector<WeightedConstraint> constraints =
      enumerate_constraints(grid, var_m0, var_m1, epsilon, deadband, options.scale_floor_mw);

  const double offset = policy_variance_offset(grid, droops, wind, deadband);

  QpProblem master = base.qp;
  QpWarmStart warm;
  bool have_warm = false;
  QpSolution qp_sol;
  std::vector<double> p0(n, 0.0);
  std::vector<int> cut_row_of(constraints.size(), -1);  // one master row per constraint
  int total_qp_iters = 0;
  int iter = 0;
  double max_violation = 0.0;

  for (iter = 1; iter <= options.max_iterations; ++iter) {
    qp_sol = solve_qp(master, have_warm ? &warm : nullptr);
    total_qp_iters += qp_sol.iterations;
    if (qp_sol.status != QpStatus::Optimal) {
      out.status = map_qp_status(qp_sol.status);
      out.detail = "master qp: " + qp_status_name(qp_sol.status);
      out.iterations = iter;
      out.qp_iterations = total_qp_iters;
      out.solve_seconds = timer.seconds();
      return out;
    }
    for (int i = 0; i < n; ++i) p0[i] = qp_sol.x(i);

    const RegimeMoments m0 = sigma_moments(grid, ptdf, droops, p0, wind, 0);
    const RegimeMoments m1 = sigma_moments(grid, ptdf, droops, p0, wind, 1);

    max_violation = 0.0;
    std::vector<Eigen::VectorXd> new_rows;
    std::vector<double> new_rhs;
    bool tightened = false;
    out.constraint_report.clear();
    for (std::size_t cid = 0; cid < constraints.size(); ++cid) {
      const WeightedConstraint& wc = constraints[cid];
      const RegimeMoments& m = wc.spec.regime == 0 ? m0 : m1;
      WccEvaluation eval = wcc_evaluate(wc.spec, m, deadband, wc.scale, wc.limit);
      out.constraint_report.push_back({wc.spec, eval.value, epsilon, wc.scale, wc.limit});
      const double violation = eval.value - epsilon;
      max_violation = std::max(max_violation, violation);
      if (violation <= options.cut_tolerance) continue;

      // The value is exactly exponential in the subject mean, so the gradient
      // cut anchored at the boundary point (where the value equals epsilon)
      // is the exact linear boundary: dir * (mu - mu*) <= t ln(eps / value).
      // Its coefficients are constraint constants; only the offset moves.
      const double dir = is_upper_side(wc.spec.subject) ? 1.0 : -1.0;
      const double move = wc.scale * std::log(epsilon / eval.value);  // < 0
      Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n);
      if (is_generator_subject(wc.spec.subject)) {
        coeffs(wc.spec.index) = dir;
      } else {
        coeffs = dir * map.gen_cols.row(wc.spec.index).transpose();
      }
      const double rhs = move + coeffs.dot(Eigen::Map<const Eigen::VectorXd>(p0.data(), n));

      if (cut_row_of[cid] >= 0) {
        const int row = cut_row_of[cid];
        if (rhs < master.h(row)) {
          master.h(row) = rhs;
          tightened = true;
        }
      } else {
        cut_row_of[cid] = static_cast<int>(master.G.rows()) +
                          static_cast<int>(new_rows.size());
        new_rows.push_back(coeffs);
        new_rhs.push_back(rhs);
      }
      Cut cut;
      cut.constraint_id = static_cast<int>(cid);
      cut.coeffs.assign(coeffs.data(), coeffs.data() + n);
      cut.offset = rhs;
      cut.iteration = iter;
      out.cuts.push_back(cut);
    }

    out.violation_trace.push_back(std::max(max_violation, 0.0));
    if (new_rows.empty() && !tightened) break;

    if (!new_rows.empty()) {
      Eigen::MatrixXd rows(new_rows.size(), n);
      Eigen::VectorXd rhs(new_rhs.size());
      for (std::size_t r = 0; r < new_rows.size(); ++r) {
        rows.row(r) = new_rows[r].transpose();
        rhs(r) = new_rhs[r];
      }
      append_rows(master, rows, rhs);
    }
    warm.x = qp_sol.x;
    warm.y = qp_sol.y;
    warm.z = qp_sol.z;
    warm.z.conservativeResize(master.G.rows());
    if (!new_rows.empty()) warm.z.tail(new_rows.size()).setConstant(1e-2);
    have_warm = true;
  }

  out.p0 = p0;
  out.setpoint_cost = 0.0;
  for (int i = 0; i < n; ++i) out.setpoint_cost += grid.generators[i].cost(p0[i]);
  out.variance_offset = offset;
  out.objective = out.setpoint_cost + offset;
  out.qp_iterations = total_qp_iters;
  out.max_violation = max_violation;
  if (iter > options.max_iterations) {
    out.iterations = options.max_iterations;
    out.status = SolveStatus::IterationLimit;
    out.detail = "cutting-plane iteration limit; max residual violation " +
                 std::to_string(max_violation);
  } else {
    out.iterations = iter;
    out.status = SolveStatus::Optimal;
  }
  out.solve_seconds = timer.seconds();
  return out;
}

}  // namespace ccopf
