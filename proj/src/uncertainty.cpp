// SPDX-License-Identifier: Apache-2.0
#include "ccopf/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccopf {

WindStatistics WindStatistics::injections(const GridCase& grid) {
  WindStatistics w;
  w.means.reserve(grid.wind_farms.size());
  w.variances.reserve(grid.wind_farms.size());
  for (const WindFarm& f : grid.wind_farms) {
    w.means.push_back(f.forecast);
    w.variances.push_back(f.stdev * f.stdev);
  }
  return w;
}

WindStatistics WindStatistics::fluctuations(const GridCase& grid) {
  WindStatistics w = injections(grid);
  std::fill(w.means.begin(), w.means.end(), 0.0);
  return w;
}

std::pair<double, double> aggregate_wind(const WindStatistics& wind) {
  const double mean = std::accumulate(wind.means.begin(), wind.means.end(), 0.0);
  const double var = std::accumulate(wind.variances.begin(), wind.variances.end(), 0.0);
  return {mean, var};
}

RegimeMoments::Conditional RegimeMoments::generator_conditional(int g) const {
  Conditional c;
  c.mean = p_mean[g];
  if (imbalance_var > 0.0) {
    const double cov_s = p_omega_cov[g] * denominator;  // cov(p, s) = cov(p, w) * D
    c.slope = cov_s / imbalance_var;
    c.residual_var = std::max(0.0, p_var[g] - cov_s * cov_s / imbalance_var);
  } else {
    c.slope = 0.0;
    c.residual_var = 0.0;
  }
  return c;
}

RegimeMoments::Conditional RegimeMoments::line_conditional(int l) const {
  Conditional c;
  c.mean = flow_mean[l];
  if (imbalance_var > 0.0) {
    const double cov_s = flow_omega_cov[l] * denominator;
    c.slope = cov_s / imbalance_var;
    c.residual_var = std::max(0.0, flow_var[l] - cov_s * cov_s / imbalance_var);
  } else {
    c.slope = 0.0;
    c.residual_var = 0.0;
  }
  return c;
}

RegimeMoments sigma_moments(const GridCase& grid, const PtdfMatrix& ptdf,
                            const DroopSet& droops, const std::vector<double>& p0,
                            const WindStatistics& wind, int regime) {
  const int n_gen = static_cast<int>(grid.generators.size());
  const int n_line = static_cast<int>(grid.lines.size());
  const int n_farm = static_cast<int>(grid.wind_farms.size());
  if (static_cast<int>(p0.size()) != n_gen)
    throw std::invalid_argument("p0 length does not match generator count");
  if (wind.size() != n_farm)
    throw std::invalid_argument("wind statistics length does not match farm count");

  RegimeMoments m;
  m.regime = regime;
  m.denominator = droops.denominator(regime);
  if (!(m.denominator > 0.0))
    throw std::domain_error("sigma_moments: degenerate response denominator");

  const auto [fluct_mean, fluct_var] = aggregate_wind(wind);
  m.imbalance_mean = fluct_mean;
  m.imbalance_var = fluct_var;
  m.omega_mean = fluct_mean / m.denominator;
  m.omega_var = fluct_var / (m.denominator * m.denominator);

  const std::vector<double> share = renormalized_droop(droops, regime);

  m.p_mean.resize(n_gen);
  m.p_omega_cov.resize(n_gen);
  m.p_var.resize(n_gen);
  for (int i = 0; i < n_gen; ++i) {
    m.p_mean[i] = p0[i] - share[i] * fluct_mean;
    m.p_omega_cov[i] = -share[i] * fluct_var / m.denominator;
    m.p_var[i] = share[i] * share[i] * fluct_var;
  }

  // Mean injections: responding generators, scheduled wind plus fluctuation
  // mean, loads withdrawn.
  const int n_bus = grid.bus_count();
  Eigen::VectorXd mean_inj = Eigen::VectorXd::Zero(n_bus);
  const auto& gen_bus = grid.generator_bus_indices();
  const auto& farm_bus = grid.farm_bus_indices();
  for (int i = 0; i < n_gen; ++i) mean_inj(gen_bus[i]) += m.p_mean[i];
  for (int w = 0; w < n_farm; ++w)
    mean_inj(farm_bus[w]) += grid.wind_farms[w].forecast + wind.means[w];
  for (int b = 0; b < n_bus; ++b) mean_inj(b) -= grid.buses[b].load;

  // Per-farm flow sensitivity after the droop response withdraws the
  // aggregate deviation: M(l, w) = ptdf(l, bus_w) - sum_g ptdf(l, bus_g) a~_g.
  Eigen::VectorXd response_col = Eigen::VectorXd::Zero(n_line);
  for (int i = 0; i < n_gen; ++i)
    response_col += share[i] * ptdf.entries.col(gen_bus[i]);

  m.flow_mean.resize(n_line);
  m.flow_omega_cov.resize(n_line);
  m.flow_var.resize(n_line);
  const Eigen::VectorXd base_flow = ptdf.entries * mean_inj;
  for (int l = 0; l < n_line; ++l) {
    double cov_s = 0.0;
    double var = 0.0;
    for (int w = 0; w < n_farm; ++w) {
      const double coeff = ptdf.entries(l, farm_bus[w]) - response_col(l);
      cov_s += coeff * wind.variances[w];
      var += coeff * coeff * wind.variances[w];
    }
    m.flow_mean[l] = base_flow(l);
    m.flow_omega_cov[l] = cov_s / m.denominator;
    m.flow_var[l] = var;
  }
  return m;
}

PrecisionMatrix precision(double theta_pp, double theta_pw, double theta_ww) {
  const double det = theta_pp * theta_ww - theta_pw * theta_pw;
  const double scale = std::max({std::abs(theta_pp * theta_ww), theta_pw * theta_pw, 1e-300});
  if (!(det > 1e-12 * scale))
    throw SingularCovariance("covariance matrix is singular within the 1e-12 relative floor "
                             "(rank-1 single-source degeneracy); use the conditional path");
  PrecisionMatrix phi;
  phi.pp = theta_ww / det;
  phi.pw = -theta_pw / det;
  phi.ww = theta_pp / det;
  return phi;
}

}  // namespace ccopf
