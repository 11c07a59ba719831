// SPDX-License-Identifier: Apache-2.0
#include "ccopf/policy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ccopf {

DroopSet DroopSet::from_case(const GridCase& grid) {
  DroopSet d;
  d.alpha1.reserve(grid.generators.size());
  d.alpha2.reserve(grid.generators.size());
  d.gamma.reserve(grid.generators.size());
  for (const Generator& g : grid.generators) {
    d.alpha1.push_back(g.alpha1);
    d.alpha2.push_back(g.alpha2);
    d.gamma.push_back(g.gamma);
  }
  return d;
}

double DroopSet::total_alpha1() const {
  return std::accumulate(alpha1.begin(), alpha1.end(), 0.0);
}
double DroopSet::total_alpha2() const {
  return std::accumulate(alpha2.begin(), alpha2.end(), 0.0);
}
double DroopSet::total_gamma() const {
  return std::accumulate(gamma.begin(), gamma.end(), 0.0);
}

double DroopSet::denominator(int regime) const {
  return (regime != 0 ? total_alpha1() : 0.0) + total_gamma();
}

void DroopSet::validate() const {
  if (alpha1.size() != alpha2.size() || alpha1.size() != gamma.size())
    throw std::invalid_argument("droop vectors have mismatched lengths");
  for (std::size_t i = 0; i < alpha1.size(); ++i)
    if (alpha1[i] < 0.0 || alpha2[i] < 0.0 || gamma[i] < 0.0)
      throw std::invalid_argument("droop coefficients must be nonnegative");
  if (!(total_alpha1() + total_gamma() > 0.0))
    throw std::invalid_argument("sum(alpha1 + gamma) must be positive");
  if (!(total_alpha2() > 0.0))
    throw std::invalid_argument("sum(alpha2) must be positive");
}

double omega_uncontrolled(double rho_total, const DroopSet& droops) {
  const double damping = droops.total_gamma();
  if (!(damping > 0.0))
    throw std::domain_error("omega_uncontrolled: sum(gamma) is zero");
  return rho_total / damping;
}

double omega_primary(double rho_total, const DroopSet& droops, bool primary_active) {
  const double denom = droops.denominator(primary_active ? 1 : 0);
  if (!(denom > 0.0))
    throw std::domain_error("omega_primary: degenerate response denominator");
  return rho_total / denom;
}

std::vector<double> renormalized_droop(const DroopSet& droops, int regime) {
  droops.validate();
  const int n = droops.size();
  const double sum_gamma = droops.total_gamma();
  const double sum_alpha2 = droops.total_alpha2();
  std::vector<double> out(n);
  if (regime != 0) {
    const double denom = droops.total_alpha1() + sum_gamma;
    const double secondary_share = sum_gamma / sum_alpha2;
    for (int i = 0; i < n; ++i)
      out[i] = (droops.alpha1[i] + droops.alpha2[i] * secondary_share) / denom;
  } else {
    // alpha1 = 0 collapses the general formula to alpha2_i / sum(alpha2).
    for (int i = 0; i < n; ++i) out[i] = droops.alpha2[i] / sum_alpha2;
  }
  return out;
}

double regime_boundary_mw(const DroopSet& droops, const Deadband& deadband,
                          DeadbandTrigger trigger) {
  if (deadband.threshold_mw < 0.0)
    throw std::invalid_argument("deadband threshold must be nonnegative");
  if (trigger == DeadbandTrigger::WithPrimaryEquilibrium) return deadband.threshold_mw;
  // Free-response variant: the undamped equilibrium reaches the frequency
  // threshold at a smaller imbalance, by the ratio of the denominators.
  const double d1 = droops.denominator(1);
  const double d0 = droops.total_gamma();
  if (!(d0 > 0.0)) throw std::domain_error("free-response trigger needs sum(gamma) > 0");
  return deadband.threshold_mw * d0 / d1;
}

int regime_of(double rho_total, const DroopSet& droops, const Deadband& deadband,
              DeadbandTrigger trigger) {
  return std::abs(rho_total) > regime_boundary_mw(droops, deadband, trigger) ? 1 : 0;
}

PolicyResponse respond(const std::vector<double>& p0, const DroopSet& droops,
                       const Deadband& deadband, const std::vector<double>& rho,
                       DeadbandTrigger trigger, std::optional<int> force_regime) {
  if (static_cast<int>(p0.size()) != droops.size())
    throw std::invalid_argument("p0 length does not match droop set");
  for (double v : p0)
    if (!std::isfinite(v)) throw std::invalid_argument("p0 contains a non-finite entry");

  const double total = std::accumulate(rho.begin(), rho.end(), 0.0);
  PolicyResponse out;
  out.regime = force_regime ? *force_regime : regime_of(total, droops, deadband, trigger);
  out.omega1 = total / droops.denominator(out.regime);

  const std::vector<double> share = renormalized_droop(droops, out.regime);
  out.p.resize(p0.size());
  for (std::size_t i = 0; i < p0.size(); ++i) out.p[i] = p0[i] - share[i] * total;
  return out;
}

}  // namespace ccopf
