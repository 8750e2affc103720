#pragma once

#include <filesystem>
#include <string>

#include "trajsplit/admm.hpp"
#include "trajsplit/model.hpp"

namespace trajsplit::io {

// Parses a JSON scenario document. Syntax errors report line and column;
// schema errors report the JSON pointer of the offending value. Both throw
// InvalidScenario. The result is validated.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

std::string serialize_scenario(const Scenario& scenario);

// Deterministic run report: flags, residual history and full waypoint list.
// Timings are left to the per-iteration table.
std::string report_json(const admm::SolveReport& report, const admm::SplitConfig& config);

// iteration,residual,cumulative_seconds,primal_seconds,consensus_seconds
std::string iterations_csv(const admm::SolveReport& report);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace trajsplit::io
