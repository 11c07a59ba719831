// SPDX-License-Identifier: Apache-2.0
#include "ccopf/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccopf {

using json = nlohmann::ordered_json;

namespace {

ParseError parse_error(const std::string& where, const std::exception& e) {
  return ParseError(where + ": " + e.what());
}

template <typename T>
T get_field(const json& obj, const char* section, std::size_t i, const char* field) {
  try {
    return obj.at(field).get<T>();
  } catch (const std::exception& e) {
    throw ParseError(std::string(section) + "[" + std::to_string(i) + "]." + field + ": " +
                     e.what());
  }
}

}  // namespace

GridCase load_case(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception& e) {
    throw parse_error("case document", e);
  }

  GridCase grid;
  try {
    grid.slack_bus = doc.at("slack_bus").get<int>();
  } catch (const std::exception& e) {
    throw parse_error("slack_bus", e);
  }

  const auto section = [&](const char* name) -> const json& {
    if (!doc.contains(name)) throw ParseError(std::string("missing section: ") + name);
    return doc.at(name);
  };

  const json& buses = section("buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    Bus b;
    b.id = get_field<int>(buses[i], "buses", i, "id");
    b.load = get_field<double>(buses[i], "buses", i, "load");
    grid.buses.push_back(b);
  }
  const json& gens = section("generators");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    Generator g;
    g.bus = get_field<int>(gens[i], "generators", i, "bus");
    g.p_min = get_field<double>(gens[i], "generators", i, "p_min");
    g.p_max = get_field<double>(gens[i], "generators", i, "p_max");
    g.cost_quad = get_field<double>(gens[i], "generators", i, "cost_quad");
    g.cost_lin = get_field<double>(gens[i], "generators", i, "cost_lin");
    g.cost_const = get_field<double>(gens[i], "generators", i, "cost_const");
    g.alpha1 = gens[i].value("alpha1", 0.0);
    g.alpha2 = gens[i].value("alpha2", 0.0);
    g.gamma = gens[i].value("gamma", 0.0);
    grid.generators.push_back(g);
  }
  const json& lines = section("lines");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Line l;
    l.from = get_field<int>(lines[i], "lines", i, "from");
    l.to = get_field<int>(lines[i], "lines", i, "to");
    l.susceptance = get_field<double>(lines[i], "lines", i, "susceptance");
    l.limit = get_field<double>(lines[i], "lines", i, "limit");
    grid.lines.push_back(l);
  }
  const json& farms = section("wind_farms");
  for (std::size_t i = 0; i < farms.size(); ++i) {
    WindFarm w;
    w.bus = get_field<int>(farms[i], "wind_farms", i, "bus");
    w.forecast = get_field<double>(farms[i], "wind_farms", i, "forecast");
    w.stdev = get_field<double>(farms[i], "wind_farms", i, "stdev");
    grid.wind_farms.push_back(w);
  }

  grid.finalize();
  return grid;
}

GridCase load_case_string(const std::string& text) {
  std::istringstream in(text);
  return load_case(in);
}

GridCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file: " + path);
  try {
    return load_case(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string save_case(const GridCase& grid) {
  json doc;
  doc["slack_bus"] = grid.slack_bus;
  doc["buses"] = json::array();
  for (const Bus& b : grid.buses) doc["buses"].push_back({{"id", b.id}, {"load", b.load}});
  doc["generators"] = json::array();
  for (const Generator& g : grid.generators)
    doc["generators"].push_back({{"bus", g.bus},
                                 {"p_min", g.p_min},
                                 {"p_max", g.p_max},
                                 {"cost_quad", g.cost_quad},
                                 {"cost_lin", g.cost_lin},
                                 {"cost_const", g.cost_const},
                                 {"alpha1", g.alpha1},
                                 {"alpha2", g.alpha2},
                                 {"gamma", g.gamma}});
  doc["lines"] = json::array();
  for (const Line& l : grid.lines)
    doc["lines"].push_back({{"from", l.from},
                            {"to", l.to},
                            {"susceptance", l.susceptance},
                            {"limit", l.limit}});
  doc["wind_farms"] = json::array();
  for (const WindFarm& w : grid.wind_farms)
    doc["wind_farms"].push_back(
        {{"bus", w.bus}, {"forecast", w.forecast}, {"stdev", w.stdev}});
  return doc.dump(2) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t hash_file(const std::string& path) { return fnv1a64(read_file(path)); }

namespace {

json config_to_json(const ConfigEcho& config) {
  json obj = json::object();
  for (const auto& [k, v] : config) obj[k] = v;
  return obj;
}

ConfigEcho config_from_json(const json& obj) {
  ConfigEcho out;
  if (obj.is_object())
    for (const auto& [k, v] : obj.items()) out[k] = v.get<std::string>();
  return out;
}

json spec_to_json(const ConstraintSpec& spec) {
  return {{"subject", subject_name(spec.subject)},
          {"index", spec.index},
          {"regime", spec.regime},
          {"epsilon", spec.epsilon}};
}

ConstraintSubject subject_from_name(const std::string& name) {
  if (name == "generator-upper") return ConstraintSubject::GeneratorUpper;
  if (name == "generator-lower") return ConstraintSubject::GeneratorLower;
  if (name == "line-upper") return ConstraintSubject::LineUpper;
  if (name == "line-lower") return ConstraintSubject::LineLower;
  throw ParseError("unknown constraint subject: " + name);
}

SolveStatus status_from_name(const std::string& name) {
  if (name == "optimal") return SolveStatus::Optimal;
  if (name == "infeasible") return SolveStatus::Infeasible;
  if (name == "iteration-limit") return SolveStatus::IterationLimit;
  throw ParseError("unknown solve status: " + name);
}

}  // namespace

std::string solution_to_json(const DispatchSolution& sol, const ConfigEcho& config) {
  json doc;
  doc["kind"] = "dispatch-solution";
  doc["formulation"] = formulation_name(sol.formulation);
  doc["status"] = solve_status_name(sol.status);
  doc["epsilon"] = sol.epsilon;
  doc["deadband_mw"] = sol.deadband_mw;
  doc["objective"] = sol.objective;
  doc["setpoint_cost"] = sol.setpoint_cost;
  doc["variance_offset"] = sol.variance_offset;
  doc["iterations"] = sol.iterations;
  doc["qp_iterations"] = sol.qp_iterations;
  doc["max_violation"] = sol.max_violation;
  doc["solve_seconds"] = sol.solve_seconds;
  doc["case_hash"] = sol.case_hash;
  doc["detail"] = sol.detail;
  doc["p0"] = sol.p0;
  doc["violation_trace"] = sol.violation_trace;
  doc["cuts"] = json::array();
  for (const Cut& cut : sol.cuts)
    doc["cuts"].push_back({{"constraint_id", cut.constraint_id},
                           {"coeffs", cut.coeffs},
                           {"offset", cut.offset},
                           {"iteration", cut.iteration}});
  doc["constraints"] = json::array();
  for (const ConstraintValue& cv : sol.constraint_report)
    doc["constraints"].push_back({{"spec", spec_to_json(cv.spec)},
                                  {"value", cv.value},
                                  {"bound", cv.bound},
                                  {"weight_scale", cv.weight_scale},
                                  {"weight_ref", cv.weight_ref}});
  doc["config"] = config_to_json(config);
  return doc.dump(2) + "\n";
}

DispatchSolution solution_from_json(const std::string& text, ConfigEcho* config) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw parse_error("solution document", e);
  }
  DispatchSolution sol;
  try {
    sol.formulation = formulation_from_name(doc.at("formulation").get<std::string>());
    sol.status = status_from_name(doc.at("status").get<std::string>());
    sol.epsilon = doc.at("epsilon").get<double>();
    sol.deadband_mw = doc.at("deadband_mw").get<double>();
    sol.objective = doc.at("objective").get<double>();
    sol.setpoint_cost = doc.at("setpoint_cost").get<double>();
    sol.variance_offset = doc.at("variance_offset").get<double>();
    sol.iterations = doc.at("iterations").get<int>();
    sol.qp_iterations = doc.at("qp_iterations").get<int>();
    sol.max_violation = doc.at("max_violation").get<double>();
    sol.solve_seconds = doc.at("solve_seconds").get<double>();
    sol.case_hash = doc.at("case_hash").get<std::uint64_t>();
    sol.detail = doc.value("detail", std::string());
    sol.p0 = doc.at("p0").get<std::vector<double>>();
    sol.violation_trace = doc.value("violation_trace", std::vector<double>());
    for (const json& c : doc.value("cuts", json::array())) {
      Cut cut;
      cut.constraint_id = c.at("constraint_id").get<int>();
      cut.coeffs = c.at("coeffs").get<std::vector<double>>();
      cut.offset = c.at("offset").get<double>();
      cut.iteration = c.at("iteration").get<int>();
      sol.cuts.push_back(cut);
    }
    for (const json& c : doc.value("constraints", json::array())) {
      ConstraintValue cv;
      const json& spec = c.at("spec");
      cv.spec.subject = subject_from_name(spec.at("subject").get<std::string>());
      cv.spec.index = spec.at("index").get<int>();
      cv.spec.regime = spec.at("regime").get<int>();
      cv.spec.epsilon = spec.at("epsilon").get<double>();
      cv.value = c.at("value").get<double>();
      cv.bound = c.at("bound").get<double>();
      cv.weight_scale = c.at("weight_scale").get<double>();
      cv.weight_ref = c.at("weight_ref").get<double>();
      sol.constraint_report.push_back(cv);
    }
    if (config) *config = config_from_json(doc.value("config", json::object()));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw parse_error("solution document", e);
  }
  return sol;
}

std::string report_to_json(const ValidationReport& report, const ConfigEcho& config) {
  json doc;
  doc["kind"] = "validation-report";
  doc["label"] = report.label;
  doc["samples"] = report.samples;
  doc["seed"] = report.seed;
  doc["case_hash"] = report.case_hash;
  doc["epsilon"] = report.epsilon;
  doc["cost_mean"] = report.cost_mean;
  doc["cost_std"] = report.cost_std;
  doc["gen_violation_rate"] = report.gen_violation_rate;
  doc["line_violation_rate"] = report.line_violation_rate;
  doc["system_violation_rate"] = report.system_violation_rate;
  doc["gen_upper_rate"] = report.gen_upper_rate;
  doc["gen_lower_rate"] = report.gen_lower_rate;
  doc["line_upper_rate"] = report.line_upper_rate;
  doc["line_lower_rate"] = report.line_lower_rate;
  doc["config"] = config_to_json(config);
  return doc.dump(2) + "\n";
}

ValidationReport report_from_json(const std::string& text, ConfigEcho* config) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw parse_error("report document", e);
  }
  ValidationReport report;
  try {
    report.label = doc.value("label", std::string());
    report.samples = doc.at("samples").get<std::int64_t>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.case_hash = doc.at("case_hash").get<std::uint64_t>();
    report.epsilon = doc.at("epsilon").get<double>();
    report.cost_mean = doc.at("cost_mean").get<double>();
    report.cost_std = doc.at("cost_std").get<double>();
    report.gen_violation_rate = doc.at("gen_violation_rate").get<double>();
    report.line_violation_rate = doc.at("line_violation_rate").get<double>();
    report.system_violation_rate = doc.at("system_violation_rate").get<double>();
    report.gen_upper_rate = doc.at("gen_upper_rate").get<std::vector<double>>();
    report.gen_lower_rate = doc.at("gen_lower_rate").get<std::vector<double>>();
    report.line_upper_rate = doc.at("line_upper_rate").get<std::vector<double>>();
    report.line_lower_rate = doc.at("line_lower_rate").get<std::vector<double>>();
    if (config) *config = config_from_json(doc.value("config", json::object()));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw parse_error("report document", e);
  }
  return report;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << contents;
  if (!out) throw ParseError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace ccopf
