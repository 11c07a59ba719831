// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "ccopf/grid.hpp"

namespace ccopf {

/// Per-generator droop data. All operations here are pure functions.
struct DroopSet {
  std::vector<double> alpha1;  // primary participation
  std::vector<double> alpha2;  // secondary participation
  std::vector<double> gamma;   // natural damping

  static DroopSet from_case(const GridCase& grid);

  int size() const { return static_cast<int>(alpha1.size()); }
  double total_alpha1() const;
  double total_alpha2() const;
  double total_gamma() const;
  // Sum of (regime * alpha1_k + gamma_k); the frequency-response denominator.
  double denominator(int regime) const;
  void validate() const;  // throws std::invalid_argument on degenerate sums
};

/// Governor dead zone, expressed in aggregate-imbalance units (MW). The
/// frequency threshold and the MW threshold are proportional; storing MW
/// matches how the threshold is specified for the test systems.
struct Deadband {
  double threshold_mw = 0.0;
};

/// Which equilibrium the dead-zone trigger is evaluated on. The default
/// compares |aggregate imbalance| directly against the MW threshold (the
/// with-primary equilibrium); FreeResponse is a sensitivity variant that
/// triggers on the undamped equilibrium instead.
enum class DeadbandTrigger {
  WithPrimaryEquilibrium,
  FreeResponse,
};

struct PolicyResponse {
  std::vector<double> p;  // realized outputs, MW
  double omega1 = 0.0;    // post-primary frequency deviation
  int regime = 0;         // 1 = primary active (outside dead zone)
};

/// Equilibrium frequency deviation with no governor response: rho_total / sum(gamma).
double omega_uncontrolled(double rho_total, const DroopSet& droops);

/// Equilibrium after primary response: rho_total / sum(alpha1 + gamma) when
/// primary_active, else the uncontrolled value.
double omega_primary(double rho_total, const DroopSet& droops, bool primary_active);

/// Renormalized per-generator participation factors for the given regime.
/// regime 1: (alpha1_i + alpha2_i * sum(gamma)/sum(alpha2)) / sum(alpha1 + gamma);
/// regime 0: same with alpha1 = 0, which reduces to alpha2_i / sum(alpha2).
/// Sums to 1 in both regimes.
std::vector<double> renormalized_droop(const DroopSet& droops, int regime);

/// Aggregate-imbalance magnitude at which the dead zone opens, for the given
/// trigger convention.
double regime_boundary_mw(const DroopSet& droops, const Deadband& deadband,
                          DeadbandTrigger trigger = DeadbandTrigger::WithPrimaryEquilibrium);

/// 1 if |rho_total| exceeds the dead-zone boundary, else 0 (tie -> 0).
int regime_of(double rho_total, const DroopSet& droops, const Deadband& deadband,
              DeadbandTrigger trigger = DeadbandTrigger::WithPrimaryEquilibrium);

/// Exact per-realization response: p_i = p0_i - a~_{i;regime} * sum(rho),
/// where rho holds per-farm deviations from the scheduled injection. The
/// response absorbs the full imbalance: sum(p0 - p) = sum(rho).
PolicyResponse respond(const std::vector<double>& p0, const DroopSet& droops,
                       const Deadband& deadband, const std::vector<double>& rho,
                       DeadbandTrigger trigger = DeadbandTrigger::WithPrimaryEquilibrium,
                       std::optional<int> force_regime = std::nullopt);

}  // namespace ccopf
