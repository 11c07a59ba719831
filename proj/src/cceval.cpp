// SPDX-License-Identifier: Apache-2.0
#include "ccopf/cceval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccopf/quadrature.hpp"
#include "ccopf/rng.hpp"

namespace ccopf {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}  // namespace

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double gaussian_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double gaussian_quantile(double q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("gaussian_quantile: probability must lie in (0, 1)");

  // Acklam's rational initializer, then Halley refinement against the
  // erfc-based CDF; accurate to ~1e-15.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (q < p_low) {
    const double u = std::sqrt(-2.0 * std::log(q));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (q <= 1.0 - p_low) {
    const double u = q - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - q));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  for (int pass = 0; pass < 2; ++pass) {
    const double err = gaussian_cdf(x) - q;
    const double u = err / gaussian_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

bool is_upper_side(ConstraintSubject s) {
  return s == ConstraintSubject::GeneratorUpper || s == ConstraintSubject::LineUpper;
}

bool is_generator_subject(ConstraintSubject s) {
  return s == ConstraintSubject::GeneratorUpper || s == ConstraintSubject::GeneratorLower;
}

std::string subject_name(ConstraintSubject s) {
  switch (s) {
    case ConstraintSubject::GeneratorUpper: return "generator-upper";
    case ConstraintSubject::GeneratorLower: return "generator-lower";
    case ConstraintSubject::LineUpper: return "line-upper";
    case ConstraintSubject::LineLower: return "line-lower";
  }
  return "?";
}

TightenedLimits analytic_cc_tightening(const GridCase& grid, const PtdfMatrix& ptdf,
                                       const DroopSet& droops, const WindStatistics& wind,
                                       double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("epsilon must lie in (0, 1)");
  const double z = gaussian_quantile(1.0 - epsilon);
  const auto [mean_total, var_total] = aggregate_wind(wind);
  (void)mean_total;
  const double sd_total = std::sqrt(var_total);
  const std::vector<double> share = renormalized_droop(droops, 1);

  const int n_gen = static_cast<int>(grid.generators.size());
  const int n_line = static_cast<int>(grid.lines.size());
  TightenedLimits out;
  out.gen_lower.resize(n_gen);
  out.gen_upper.resize(n_gen);
  out.gen_margin.resize(n_gen);
  out.line_margin.resize(n_line);

  for (int i = 0; i < n_gen; ++i) {
    const double margin = z * share[i] * sd_total;
    out.gen_margin[i] = margin;
    out.gen_lower[i] = grid.generators[i].p_min + margin;
    out.gen_upper[i] = grid.generators[i].p_max - margin;
    if (out.gen_lower[i] > out.gen_upper[i] + 1e-12 && out.feasible) {
      out.feasible = false;
      out.infeasible_detail = "generator " + std::to_string(i) +
                              ": tightened limits cross (margin " + std::to_string(margin) +
                              " MW)";
    }
  }

  const auto& gen_bus = grid.generator_bus_indices();
  const auto& farm_bus = grid.farm_bus_indices();
  Eigen::VectorXd response_col = Eigen::VectorXd::Zero(n_line);
  for (int i = 0; i < n_gen; ++i)
    response_col += share[i] * ptdf.entries.col(gen_bus[i]);
  for (int l = 0; l < n_line; ++l) {
    double var = 0.0;
    for (std::size_t w = 0; w < grid.wind_farms.size(); ++w) {
      const double coeff = ptdf.entries(l, farm_bus[w]) - response_col(l);
      var += coeff * coeff * wind.variances[w];
    }
    out.line_margin[l] = z * std::sqrt(var);
    if (out.line_margin[l] >= grid.lines[l].limit && out.feasible) {
      out.feasible = false;
      out.infeasible_detail = "line " + std::to_string(l) + ": margin " +
                              std::to_string(out.line_margin[l]) + " MW exceeds limit";
    }
  }
  return out;
}

double exp_weight_gaussian_mean(double mean, double var, double scale, bool upper_side,
                                double ref) {
  const double dir = upper_side ? 1.0 : -1.0;
  return std::exp(dir * (mean - ref) / scale + var / (2.0 * scale * scale));
}

namespace {

struct SubjectView {
  double mean;
  double slope;         // d subject / d s
  double residual_var;  // conditional variance given s
};

SubjectView subject_view(const ConstraintSpec& spec, const RegimeMoments& moments) {
  RegimeMoments::Conditional c;
  if (is_generator_subject(spec.subject)) {
    if (spec.index < 0 || spec.index >= static_cast<int>(moments.p_mean.size()))
      throw std::out_of_range("constraint generator index out of range");
    c = moments.generator_conditional(spec.index);
  } else {
    if (spec.index < 0 || spec.index >= static_cast<int>(moments.flow_mean.size()))
      throw std::out_of_range("constraint line index out of range");
    c = moments.line_conditional(spec.index);
  }
  return {c.mean, c.slope, c.residual_var};
}

}  // namespace

WccEvaluation wcc_evaluate(const ConstraintSpec& spec, const RegimeMoments& moments,
                           const Deadband& deadband, double weight_scale, double weight_ref) {
  if (!(weight_scale > 0.0)) throw std::invalid_argument("weight_scale must be positive");
  if (spec.regime != moments.regime)
    throw std::invalid_argument("constraint regime does not match the moments' regime");

  const double dir = is_upper_side(spec.subject) ? 1.0 : -1.0;
  const double t = weight_scale;
  const SubjectView x = subject_view(spec, moments);
  const double mu_s = moments.imbalance_mean;
  const double v_s = moments.imbalance_var;
  const double boundary = deadband.threshold_mw;

  WccEvaluation out;

  if (!(v_s > 0.0)) {
    // Deterministic limit: all mass at s = mu_s.
    const bool inside = std::abs(mu_s) <= boundary;
    const bool in_event = (spec.regime == 0) ? inside : !inside;
    out.value = in_event ? std::exp(dir * (x.mean - weight_ref) / t) : 0.0;
    out.d_value_d_mean = dir / t * out.value;
    out.quad_error = 0.0;
    return out;
  }

  const double sd_s = std::sqrt(v_s);
  // The integrand is exp-weight times the conditional moment factor times the
  // Gaussian density; everything combines into one exponent.
  const double base_exponent =
      dir * (x.mean - weight_ref) / t + x.residual_var / (2.0 * t * t);
  auto integrand = [&](double s) {
    const double centered = s - mu_s;
    const double e = base_exponent + dir * x.slope * centered / t -
                     centered * centered / (2.0 * v_s);
    return std::exp(e) / (sd_s * std::sqrt(2.0 * M_PI));
  };

  // The exp weight recenters the effective Gaussian; integrate around the
  // shifted peak so tail truncation is harmless.
  const double peak = mu_s + dir * x.slope * v_s / t;
  const double lo = std::min(mu_s, peak) - 10.0 * sd_s;
  const double hi = std::max(mu_s, peak) + 10.0 * sd_s;

  std::vector<std::pair<double, double>> pieces;
  if (spec.regime == 0) {
    pieces.emplace_back(std::max(lo, -boundary), std::min(hi, boundary));
  } else {
    pieces.emplace_back(lo, std::min(hi, -boundary));
    pieces.emplace_back(std::max(lo, boundary), hi);
  }

  // 1e-9 absolute; the relative escape covers the astronomically large values
  // seen at uncut master iterates, where only the cut direction matters.
  const double tol = 1e-9;
  double value = 0.0, err = 0.0;
  for (const auto& [a, b] : pieces) {
    if (!(b > a)) continue;
    QuadratureResult q = gauss_kronrod_adaptive(integrand, a, b, tol / 2.0, 1e-12);
    if (!q.converged)
      throw QuadratureError("weighted chance constraint quadrature did not converge; "
                            "achieved error " + std::to_string(q.abs_error));
    value += q.value;
    err += q.abs_error;
  }

  out.value = std::max(0.0, value);
  // A shift of the subject mean multiplies the weight by exp(dir*shift/t),
  // so the mean derivative is exact.
  out.d_value_d_mean = dir / t * out.value;
  out.quad_error = err;
  return out;
}

namespace {

struct OracleSetup {
  double dir = 1.0;
  double limit = 0.0;
  std::vector<double> share0, share1;
  // For line subjects: base flow and per-farm/regime response coefficients.
  double flow_base = 0.0;
  std::vector<double> farm_coeff;  // ptdf(l, bus_w)
  double response0 = 0.0, response1 = 0.0;
};

OracleSetup oracle_setup(const ConstraintSpec& spec, const GridCase& grid,
                         const PtdfMatrix& ptdf, const DroopSet& droops,
                         const std::vector<double>& p0) {
  OracleSetup s;
  s.dir = is_upper_side(spec.subject) ? 1.0 : -1.0;
  s.share0 = renormalized_droop(droops, 0);
  s.share1 = renormalized_droop(droops, 1);

  if (is_generator_subject(spec.subject)) {
    const Generator& g = grid.generators.at(spec.index);
    s.limit = is_upper_side(spec.subject) ? g.p_max : g.p_min;
    return s;
  }

  const Line& line = grid.lines.at(spec.index);
  s.limit = is_upper_side(spec.subject) ? line.limit : -line.limit;

  const int n_bus = grid.bus_count();
  Eigen::VectorXd scheduled = Eigen::VectorXd::Zero(n_bus);
  const auto& gen_bus = grid.generator_bus_indices();
  const auto& farm_bus = grid.farm_bus_indices();
  for (std::size_t i = 0; i < p0.size(); ++i) scheduled(gen_bus[i]) += p0[i];
  for (std::size_t w = 0; w < grid.wind_farms.size(); ++w)
    scheduled(farm_bus[w]) += grid.wind_farms[w].forecast;
  for (int b = 0; b < n_bus; ++b) scheduled(b) -= grid.buses[b].load;
  s.flow_base = ptdf.entries.row(spec.index).dot(scheduled);

  s.farm_coeff.resize(grid.wind_farms.size());
  for (std::size_t w = 0; w < grid.wind_farms.size(); ++w)
    s.farm_coeff[w] = ptdf.entries(spec.index, farm_bus[w]);
  for (std::size_t i = 0; i < p0.size(); ++i) {
    s.response0 += s.share0[i] * ptdf.entries(spec.index, gen_bus[i]);
    s.response1 += s.share1[i] * ptdf.entries(spec.index, gen_bus[i]);
  }
  return s;
}

template <typename SampleFn>
McEstimate run_oracle(std::int64_t n, SampleFn&& fn) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double v = fn(k);
    sum += v;
    sumsq += v * v;
  }
  McEstimate est;
  est.samples = n;
  est.value = sum / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                                         static_cast<double>(n - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

}  // namespace

McEstimate wcc_mc_oracle(const ConstraintSpec& spec, const GridCase& grid,
                         const PtdfMatrix& ptdf, const DroopSet& droops,
                         const std::vector<double>& p0, const WindStatistics& wind,
                         const Deadband& deadband, std::int64_t n, std::uint64_t seed,
                         double weight_scale, double weight_ref) {
  if (!(weight_scale > 0.0)) throw std::invalid_argument("weight_scale must be positive");
  const OracleSetup setup = oracle_setup(spec, grid, ptdf, droops, p0);
  const int farms = wind.size();
  std::vector<double> sd(farms);
  for (int w = 0; w < farms; ++w) sd[w] = std::sqrt(wind.variances[w]);
  const bool gen_subject = is_generator_subject(spec.subject);

  return run_oracle(n, [&](std::int64_t k) {
    double total = 0.0;
    double subject_dev = 0.0;
    for (int w = 0; w < farms; ++w) {
      const double dev = wind.means[w] +
                         sd[w] * normal_draw(seed, static_cast<std::uint64_t>(k) * farms + w);
      total += dev;
      if (!gen_subject) subject_dev += setup.farm_coeff[w] * dev;
    }
    const int regime = std::abs(total) > deadband.threshold_mw ? 1 : 0;
    if (regime != spec.regime) return 0.0;
    double x;
    if (gen_subject) {
      const auto& share = regime == 1 ? setup.share1 : setup.share0;
      x = p0[spec.index] - share[spec.index] * total;
    } else {
      const double response = regime == 1 ? setup.response1 : setup.response0;
      x = setup.flow_base + subject_dev - response * total;
    }
    return std::exp(setup.dir * (x - weight_ref) / weight_scale);
  });
}

McEstimate step_cc_probability(const ConstraintSpec& spec, const GridCase& grid,
                               const PtdfMatrix& ptdf, const DroopSet& droops,
                               const std::vector<double>& p0, const WindStatistics& wind,
                               const Deadband& deadband, std::int64_t n, std::uint64_t seed) {
  const OracleSetup setup = oracle_setup(spec, grid, ptdf, droops, p0);
  const int farms = wind.size();
  std::vector<double> sd(farms);
  for (int w = 0; w < farms; ++w) sd[w] = std::sqrt(wind.variances[w]);
  const bool gen_subject = is_generator_subject(spec.subject);

  return run_oracle(n, [&](std::int64_t k) {
    double total = 0.0;
    double subject_dev = 0.0;
    for (int w = 0; w < farms; ++w) {
      const double dev = wind.means[w] +
                         sd[w] * normal_draw(seed, static_cast<std::uint64_t>(k) * farms + w);
      total += dev;
      if (!gen_subject) subject_dev += setup.farm_coeff[w] * dev;
    }
    const int regime = std::abs(total) > deadband.threshold_mw ? 1 : 0;
    if (regime != spec.regime) return 0.0;
    double x;
    if (gen_subject) {
      const auto& share = regime == 1 ? setup.share1 : setup.share0;
      x = p0[spec.index] - share[spec.index] * total;
    } else {
      const double response = regime == 1 ? setup.response1 : setup.response0;
      x = setup.flow_base + subject_dev - response * total;
    }
    const bool violated = setup.dir > 0.0 ? x > setup.limit : x < setup.limit;
    return violated ? 1.0 : 0.0;
  });
}

}  // namespace ccopf
