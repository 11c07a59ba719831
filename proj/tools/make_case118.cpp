// SPDX-License-Identifier: Apache-2.0
//
// Writes the 118-bus study case: 118 buses, 186 branches, 54 generators at
// the standard generator buses of the public 118-bus test system, nine wind
// farms totalling 1053 MW, uniform droop participation 1/54 with damping
// alpha1/9. Line ratings are sized from a base DC-OPF so the derated study
// variant congests without becoming infeasible. Fully deterministic.
//
// Usage: make_case118 [output.json]

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ccopf/grid.hpp"
#include "ccopf/io.hpp"
#include "ccopf/policy.hpp"
#include "ccopf/rng.hpp"
#include "ccopf/solver.hpp"
#include "ccopf/uncertainty.hpp"

namespace {

constexpr int kBuses = 118;
constexpr int kLines = 186;
constexpr double kBaseLoadTotal = 4242.0;

const int kGenBuses[54] = {1,  4,  6,  8,  10, 12, 15, 18,  19,  24,  25,  26,  27, 31,
                           32, 34, 36, 40, 42, 46, 49, 54,  55,  56,  59,  61,  62, 65,
                           66, 69, 70, 72, 73, 74, 76, 77,  80,  85,  87,  89,  90, 91,
                           92, 99, 100, 103, 104, 105, 107, 110, 111, 112, 113, 116};

const double kGenCaps[54] = {100, 100, 100, 100, 550, 185, 100, 100, 100, 100, 320, 413.9,
                             100, 107, 100, 100, 100, 100, 100, 119, 304, 148, 100, 100,
                             255, 260, 100, 491, 492, 805.2, 100, 100, 100, 100, 100, 100,
                             577, 104.0, 104, 707, 100, 100, 100, 100, 352, 140, 100, 100,
                             100, 100, 136, 100, 100, 100};

const int kWindBuses[9] = {3, 8, 11, 20, 24, 38, 43, 49, 50};
const double kWindForecast[9] = {70, 147, 102, 105, 113, 250, 118, 76, 72};

double jitter(std::uint64_t stream, std::uint64_t i, double lo, double hi) {
  return lo + (hi - lo) * ccopf::uniform_open01(stream, i);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out_path = argc > 1 ? argv[1] : "data/case118_wind.json";

  ccopf::GridCase grid;
  grid.slack_bus = 69;  // largest unit

  // Loads: pseudo-random profile, a few hub buses at zero, normalized.
  std::vector<double> load(kBuses + 1, 0.0);
  double load_sum = 0.0;
  for (int b = 1; b <= kBuses; ++b) {
    const double u = ccopf::uniform_open01(11, b);
    load[b] = u < 0.08 ? 0.0 : 8.0 + 62.0 * ccopf::uniform_open01(12, b);
    load_sum += load[b];
  }
  for (int b = 1; b <= kBuses; ++b) {
    load[b] = std::round(load[b] * kBaseLoadTotal / load_sum * 10.0) / 10.0;
    grid.buses.push_back({b, load[b]});
  }

  // Topology: ring plus deterministic chords, 186 branches total.
  std::vector<std::pair<int, int>> edges;
  auto has_edge = [&](int a, int b) {
    for (const auto& [x, y] : edges)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  };
  for (int b = 1; b <= kBuses; ++b) edges.emplace_back(b, b % kBuses + 1);
  const int steps[6] = {9, 17, 29, 41, 53, 67};
  for (int k = 0; static_cast<int>(edges.size()) < kLines; ++k) {
    const int step = steps[k % 6];
    const int a = 1 + (k * 13) % kBuses;
    const int b = (a - 1 + step) % kBuses + 1;
    if (a == b || has_edge(a, b)) continue;
    edges.emplace_back(a, b);
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    ccopf::Line l;
    l.from = edges[e].first;
    l.to = edges[e].second;
    l.susceptance = e < kBuses ? jitter(13, e, 12.0, 36.0) : jitter(14, e, 6.0, 24.0);
    l.susceptance = std::round(l.susceptance * 100.0) / 100.0;
    l.limit = 99999.0;  // provisional; sized below
    grid.lines.push_back(l);
  }

  // Generators: three cost tiers by size plus a cheap steep-quadratic band of
  // small units that rides its caps at the system marginal price.
  const double alpha = 1.0 / 54.0;
  for (int i = 0; i < 54; ++i) {
    ccopf::Generator g;
    g.bus = kGenBuses[i];
    g.p_min = 0.0;
    g.p_max = kGenCaps[i];
    if (g.p_max >= 400.0) {
      g.cost_quad = jitter(21, i, 0.004, 0.008);
      g.cost_lin = jitter(22, i, 13.0, 17.0);
      g.cost_const = std::round(jitter(23, i, 200.0, 320.0));
    } else if (g.p_max >= 150.0) {
      g.cost_quad = jitter(21, i, 0.014, 0.028);
      g.cost_lin = jitter(22, i, 19.0, 26.0);
      g.cost_const = std::round(jitter(23, i, 90.0, 150.0));
    } else if (g.p_max >= 105.0) {
      g.cost_quad = jitter(21, i, 0.035, 0.06);
      g.cost_lin = jitter(22, i, 22.0, 28.0);
      g.cost_const = std::round(jitter(23, i, 40.0, 80.0));
    } else if (i % 2 == 1 || i == 37) {
      // cheap steep band (includes the 104 MW unit at index 37): rides its
      // cap at the system marginal price
      g.cost_quad = jitter(21, i, 0.045, 0.065);
      g.cost_lin = jitter(22, i, 6.5, 9.5);
      g.cost_const = std::round(jitter(23, i, 30.0, 60.0));
    } else {
      // expensive flat band: sits at its minimum
      g.cost_quad = jitter(21, i, 0.006, 0.01);
      g.cost_lin = jitter(22, i, 27.0, 34.0);
      g.cost_const = std::round(jitter(23, i, 30.0, 60.0));
    }
    g.cost_quad = std::round(g.cost_quad * 1e4) / 1e4;
    g.cost_lin = std::round(g.cost_lin * 100.0) / 100.0;
    g.alpha1 = alpha;
    g.alpha2 = alpha;
    g.gamma = alpha / 9.0;
    grid.generators.push_back(g);
  }

  for (int w = 0; w < 9; ++w)
    grid.wind_farms.push_back({kWindBuses[w], kWindForecast[w], 0.1 * kWindForecast[w]});

  grid.finalize();

  // Size line ratings from the flows of the heavy-load variant: leave room
  // for the response to wind swings, then let the 25% derate bite.
  ccopf::GridCase sizing = ccopf::apply_case_modifiers(grid, 0.0, 1.10);
  ccopf::PtdfMatrix ptdf = ccopf::build_ptdf(sizing);
  ccopf::DispatchSolution base = ccopf::solve_dcopf(sizing, ptdf);
  if (base.status != ccopf::SolveStatus::Optimal) {
    std::fprintf(stderr, "sizing dcopf failed: %s\n", base.detail.c_str());
    return 1;
  }
  ccopf::DroopSet droops = ccopf::DroopSet::from_case(sizing);
  ccopf::WindStatistics fluct = ccopf::WindStatistics::fluctuations(sizing);
  ccopf::RegimeMoments moments =
      ccopf::sigma_moments(sizing, ptdf, droops, base.p0, fluct, 1);

  for (std::size_t l = 0; l < grid.lines.size(); ++l) {
    const double flow = std::abs(moments.flow_mean[l]);
    const double sd = std::sqrt(moments.flow_var[l]);
    const double derated = 1.02 * flow + 4.55 * sd + 6.0;
    grid.lines[l].limit = std::ceil(derated / 0.75 / 5.0) * 5.0;
  }
  grid.finalize();

  ccopf::write_file(out_path, ccopf::save_case(grid));
  std::printf("wrote %s: %d buses, %zu lines, %zu generators (%.1f MW), %zu wind farms "
              "(%.0f MW), base load %.1f MW\n",
              out_path.c_str(), grid.bus_count(), grid.lines.size(), grid.generators.size(),
              [&] {
                double s = 0;
                for (const auto& g : grid.generators) s += g.p_max;
                return s;
              }(),
              grid.wind_farms.size(), grid.total_wind_forecast(), grid.total_load());
  return 0;
}
