// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "ccopf/grid.hpp"
#include "ccopf/montecarlo.hpp"
#include "ccopf/solver.hpp"

namespace ccopf {

/// Case document: JSON with top-level sections buses, generators, lines,
/// wind_farms, slack_bus. Units are MW and per-unit susceptance.
GridCase load_case(std::istream& in);
GridCase load_case_string(const std::string& text);
GridCase load_case_file(const std::string& path);  // ParseError names the path

std::string save_case(const GridCase& grid);

/// FNV-1a 64-bit content hash, used to tie solutions/reports to a case file.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t hash_file(const std::string& path);

using ConfigEcho = std::map<std::string, std::string>;

std::string solution_to_json(const DispatchSolution& sol, const ConfigEcho& config);
DispatchSolution solution_from_json(const std::string& text, ConfigEcho* config = nullptr);

std::string report_to_json(const ValidationReport& report, const ConfigEcho& config);
ValidationReport report_from_json(const std::string& text, ConfigEcho* config = nullptr);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);  // ParseError names the path

}  // namespace ccopf
