// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: solve / validate / compare / report.
// Exit codes: 0 ok, 1 solver infeasible or iteration limit, 2 I/O or parse
// error, 3 case-hash mismatch, 4 scenario-seed mismatch.

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccopf/io.hpp"
#include "ccopf/montecarlo.hpp"
#include "ccopf/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitIo = 2;
constexpr int kExitCaseHash = 3;
constexpr int kExitSeed = 4;

struct CaseOptions {
  std::string path;
  double line_derate = 0.0;
  double load_scale = 1.0;
  std::optional<double> alpha1_uniform;
  std::optional<double> alpha2_uniform;
  std::optional<double> gamma_uniform;
};

void add_case_options(CLI::App* cmd, CaseOptions* opts) {
  cmd->add_option("--case", opts->path, "case document (JSON)")->required();
  cmd->add_option("--line-derate", opts->line_derate,
                  "fraction removed from every line limit");
  cmd->add_option("--load-scale", opts->load_scale, "factor applied to every bus load");
  cmd->add_option("--alpha1-uniform", opts->alpha1_uniform,
                  "override primary droop with a uniform per-generator value");
  cmd->add_option("--alpha2-uniform", opts->alpha2_uniform,
                  "override secondary droop with a uniform per-generator value");
  cmd->add_option("--gamma-uniform", opts->gamma_uniform,
                  "override damping with a uniform per-generator value");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

// Case identity covers the file bytes and the modifiers actually applied.
std::uint64_t effective_case_hash(const CaseOptions& opts) {
  const std::string bytes = ccopf::read_file(opts.path);
  return ccopf::fnv1a64(bytes + "\nmodifiers derate=" + format_double(opts.line_derate) +
                        " scale=" + format_double(opts.load_scale));
}

ccopf::GridCase load_prepared_case(const CaseOptions& opts) {
  ccopf::GridCase grid = ccopf::load_case_file(opts.path);
  if (opts.line_derate != 0.0 || opts.load_scale != 1.0)
    grid = ccopf::apply_case_modifiers(grid, opts.line_derate, opts.load_scale);

  // Droop defaults: uniform 1/N participation with gamma = alpha1/9 when the
  // case carries no droop data at all; explicit flags override either way.
  bool any_droop = false;
  for (const ccopf::Generator& g : grid.generators)
    if (g.alpha1 != 0.0 || g.alpha2 != 0.0 || g.gamma != 0.0) any_droop = true;
  const double n = static_cast<double>(grid.generators.size());
  for (ccopf::Generator& g : grid.generators) {
    if (!any_droop) {
      g.alpha1 = 1.0 / n;
      g.alpha2 = 1.0 / n;
      g.gamma = g.alpha1 / 9.0;
    }
    if (opts.alpha1_uniform) g.alpha1 = *opts.alpha1_uniform;
    if (opts.alpha2_uniform) g.alpha2 = *opts.alpha2_uniform;
    if (opts.gamma_uniform) g.gamma = *opts.gamma_uniform;
  }
  grid.finalize();
  return grid;
}

void echo_case_options(ccopf::ConfigEcho& echo, const CaseOptions& opts) {
  echo["case"] = opts.path;
  echo["line_derate"] = format_double(opts.line_derate);
  echo["load_scale"] = format_double(opts.load_scale);
  echo["case_hash"] = format_hash(effective_case_hash(opts));
  if (opts.alpha1_uniform) echo["alpha1_uniform"] = format_double(*opts.alpha1_uniform);
  if (opts.alpha2_uniform) echo["alpha2_uniform"] = format_double(*opts.alpha2_uniform);
  if (opts.gamma_uniform) echo["gamma_uniform"] = format_double(*opts.gamma_uniform);
}

int run_solve(const CaseOptions& case_opts, const std::string& formulation, double epsilon,
              double deadband_mw, const std::string& out_path) {
  ccopf::GridCase grid = load_prepared_case(case_opts);
  ccopf::PtdfMatrix ptdf = ccopf::build_ptdf(grid);
  ccopf::DroopSet droops = ccopf::DroopSet::from_case(grid);
  ccopf::WindStatistics fluct = ccopf::WindStatistics::fluctuations(grid);

  ccopf::DispatchSolution sol;
  const ccopf::Formulation form = ccopf::formulation_from_name(formulation);
  switch (form) {
    case ccopf::Formulation::Dcopf:
      sol = ccopf::solve_dcopf(grid, ptdf);
      break;
    case ccopf::Formulation::Ccopf:
      sol = ccopf::solve_ccopf(grid, ptdf, droops, fluct, epsilon);
      break;
    case ccopf::Formulation::CcopfPfr:
      sol = ccopf::solve_ccopf_pfr(grid, ptdf, droops, fluct, epsilon,
                                   ccopf::Deadband{deadband_mw});
      break;
  }
  sol.case_hash = effective_case_hash(case_opts);
  // The dead zone is a property of the system, not the formulation; carry it
  // into the document so validation replays the same physical policy.
  sol.deadband_mw = deadband_mw;

  ccopf::ConfigEcho echo;
  echo_case_options(echo, case_opts);
  echo["formulation"] = formulation;
  echo["epsilon"] = format_double(epsilon);
  echo["deadband_mw"] = format_double(deadband_mw);
  if (!out_path.empty()) ccopf::write_file(out_path, ccopf::solution_to_json(sol, echo));

  std::printf("formulation=%s status=%s objective=%.4f iterations=%d qp_iterations=%d "
              "wall=%.3fs\n",
              formulation.c_str(), ccopf::solve_status_name(sol.status).c_str(), sol.objective,
              sol.iterations, sol.qp_iterations, sol.solve_seconds);
  if (sol.status != ccopf::SolveStatus::Optimal) {
    std::fprintf(stderr, "solver: %s\n", sol.detail.c_str());
    return kExitSolver;
  }
  return kExitOk;
}

int run_validate(const CaseOptions& case_opts, const std::string& solution_path,
                 std::int64_t samples, std::uint64_t seed, const std::string& label,
                 bool truncate_negative, const std::string& trigger,
                 const std::string& out_path) {
  ccopf::GridCase grid = load_prepared_case(case_opts);
  ccopf::DispatchSolution sol = ccopf::solution_from_json(ccopf::read_file(solution_path));
  const std::uint64_t expected = effective_case_hash(case_opts);
  if (sol.case_hash != expected) {
    std::fprintf(stderr,
                 "case-hash mismatch: solution was produced for %s, current case is %s\n",
                 format_hash(sol.case_hash).c_str(), format_hash(expected).c_str());
    return kExitCaseHash;
  }
  ccopf::PtdfMatrix ptdf = ccopf::build_ptdf(grid);
  ccopf::DroopSet droops = ccopf::DroopSet::from_case(grid);
  ccopf::ScenarioSet scenarios =
      ccopf::sample_wind(ccopf::WindStatistics::injections(grid), samples, seed);

  ccopf::ValidateOptions options;
  options.truncate_negative = truncate_negative;
  options.trigger = trigger == "free-response" ? ccopf::DeadbandTrigger::FreeResponse
                                               : ccopf::DeadbandTrigger::WithPrimaryEquilibrium;
  ccopf::ValidationReport report =
      ccopf::validate(sol, grid, ptdf, droops, ccopf::Deadband{sol.deadband_mw}, scenarios,
                      options);
  report.label = label;
  report.case_hash = expected;

  ccopf::ConfigEcho echo;
  echo_case_options(echo, case_opts);
  echo["solution"] = solution_path;
  echo["samples"] = std::to_string(samples);
  echo["seed"] = std::to_string(seed);
  echo["trigger"] = trigger;
  echo["truncate_negative"] = truncate_negative ? "true" : "false";
  if (!out_path.empty()) ccopf::write_file(out_path, ccopf::report_to_json(report, echo));

  std::printf("label=%s samples=%" PRId64 " cost_mean=%.4f cost_std=%.4f sys_rate=%.6f "
              "gen_rate=%.6f line_rate=%.6f\n",
              label.c_str(), report.samples, report.cost_mean, report.cost_std,
              report.system_violation_rate, report.gen_violation_rate,
              report.line_violation_rate);
  return kExitOk;
}

int run_compare(const std::vector<std::string>& run_specs, const std::string& out_path,
                const std::string& plot_path, bool zero_timing) {
  std::vector<ccopf::LabeledRun> runs;
  for (const std::string& spec : run_specs) {
    const auto eq = spec.find('=');
    const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos)
      throw CLI::ValidationError("--run", "expected LABEL=solution.json:report.json");
    ccopf::LabeledRun run;
    run.label = spec.substr(0, eq);
    run.solution = ccopf::solution_from_json(ccopf::read_file(spec.substr(eq + 1, colon - eq - 1)));
    run.report = ccopf::report_from_json(ccopf::read_file(spec.substr(colon + 1)));
    runs.push_back(std::move(run));
  }
  for (const ccopf::LabeledRun& run : runs) {
    if (run.report.seed != runs.front().report.seed ||
        run.report.samples != runs.front().report.samples) {
      std::fprintf(stderr, "scenario-seed mismatch between runs (label %s)\n",
                   run.label.c_str());
      return kExitSeed;
    }
    if (run.solution.case_hash != runs.front().solution.case_hash ||
        run.report.case_hash != runs.front().solution.case_hash) {
      std::fprintf(stderr, "case-hash mismatch between runs (label %s)\n", run.label.c_str());
      return kExitCaseHash;
    }
  }
  ccopf::ComparisonTable table = ccopf::compare(runs);
  const std::string csv = ccopf::comparison_csv(table, zero_timing);
  if (!out_path.empty())
    ccopf::write_file(out_path, csv);
  else
    std::fputs(csv.c_str(), stdout);
  if (!plot_path.empty()) ccopf::write_file(plot_path, ccopf::plot_csv(table));
  return kExitOk;
}

int run_report(const std::string& input_path) {
  const std::string text = ccopf::read_file(input_path);
  if (text.find("\"dispatch-solution\"") != std::string::npos) {
    ccopf::DispatchSolution sol = ccopf::solution_from_json(text);
    std::printf("dispatch solution (%s)\n", ccopf::formulation_name(sol.formulation).c_str());
    std::printf("  status           %s\n", ccopf::solve_status_name(sol.status).c_str());
    std::printf("  epsilon          %g\n", sol.epsilon);
    std::printf("  deadband         %g MW\n", sol.deadband_mw);
    std::printf("  objective        %.4f $\n", sol.objective);
    std::printf("  setpoint cost    %.4f $\n", sol.setpoint_cost);
    std::printf("  variance offset  %.4f $\n", sol.variance_offset);
    std::printf("  iterations       %d (qp %d)\n", sol.iterations, sol.qp_iterations);
    std::printf("  cuts retained    %zu\n", sol.cuts.size());
    std::printf("  wall time        %.3f s\n", sol.solve_seconds);
    double p_total = 0.0;
    for (double p : sol.p0) p_total += p;
    std::printf("  dispatch total   %.3f MW over %zu generators\n", p_total, sol.p0.size());
    int binding = 0;
    for (const ccopf::ConstraintValue& cv : sol.constraint_report)
      if (cv.value > 0.9 * cv.bound) ++binding;
    if (!sol.constraint_report.empty())
      std::printf("  weighted constraints near bound: %d of %zu\n", binding,
                  sol.constraint_report.size());
    return kExitOk;
  }
  ccopf::ValidationReport rep = ccopf::report_from_json(text);
  std::printf("validation report (label %s)\n", rep.label.c_str());
  std::printf("  samples          %" PRId64 " (seed %" PRIu64 ")\n", rep.samples, rep.seed);
  std::printf("  cost mean        %.4f $\n", rep.cost_mean);
  std::printf("  cost std         %.4f $\n", rep.cost_std);
  std::printf("  system rate      %.6f\n", rep.system_violation_rate);
  std::printf("  generator rate   %.6f\n", rep.gen_violation_rate);
  std::printf("  line rate        %.6f\n", rep.line_violation_rate);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chance-constrained DC-OPF with dead-zone primary frequency response"};
  app.require_subcommand(1);

  CaseOptions solve_case, validate_case;
  std::string formulation = "ccopf-pfr", solve_out;
  double epsilon = 0.01, deadband_mw = 0.0;
  CLI::App* solve = app.add_subcommand("solve", "solve a dispatch formulation");
  add_case_options(solve, &solve_case);
  solve->add_option("--formulation", formulation, "dcopf | ccopf | ccopf-pfr");
  solve->add_option("--epsilon", epsilon, "constraint tolerance level in (0,1)");
  solve->add_option("--deadband", deadband_mw, "dead zone threshold, MW of imbalance");
  solve->add_option("--out", solve_out, "solution document path");

  std::string validate_solution, validate_out, validate_label = "run",
              validate_trigger = "with-primary";
  std::int64_t samples = 10000;
  std::uint64_t seed = 42;
  bool truncate_negative = false;
  CLI::App* validate = app.add_subcommand("validate", "out-of-sample validation");
  add_case_options(validate, &validate_case);
  validate->add_option("--solution", validate_solution, "solution document")->required();
  validate->add_option("--samples", samples, "scenario count");
  validate->add_option("--seed", seed, "scenario seed");
  validate->add_option("--label", validate_label, "label stored in the report");
  validate->add_option("--trigger", validate_trigger, "with-primary | free-response");
  validate->add_flag("--truncate-negative", truncate_negative,
                     "clip negative wind realizations at zero");
  validate->add_option("--out", validate_out, "report document path");

  std::vector<std::string> run_specs;
  std::string compare_out, compare_plot;
  bool zero_timing = false;
  CLI::App* compare = app.add_subcommand("compare", "tabulate solution/report pairs");
  compare->add_option("--run", run_specs, "LABEL=solution.json:report.json")->required();
  compare->add_option("--out", compare_out, "comparison CSV path");
  compare->add_option("--plot-out", compare_plot, "plot-data CSV path");
  compare->add_flag("--zero-timing", zero_timing, "write 0 in the solve_seconds column");

  std::string report_input;
  CLI::App* report = app.add_subcommand("report", "summarize a document");
  report->add_option("--input", report_input, "solution or report document")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(solve_case, formulation, epsilon, deadband_mw, solve_out);
    if (validate->parsed())
      return run_validate(validate_case, validate_solution, samples, seed, validate_label,
                          truncate_negative, validate_trigger, validate_out);
    if (compare->parsed()) return run_compare(run_specs, compare_out, compare_plot, zero_timing);
    if (report->parsed()) return run_report(report_input);
  } catch (const ccopf::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const ccopf::CaseValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
