#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "aoii/experiments.hpp"
#include "aoii/simulator.hpp"
#include "aoii/smdp_solver.hpp"

namespace aoii {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json solver_result_to_json(const SolverResult& result);
Json simulation_report_to_json(const SimulationReport& report);
Json cycle_estimate_to_json(const CycleParameterEstimate& est);
Json error_to_json(const Error& e);

// Inline model description: {"q": [[...]], "penalties": [[...]]} and
// {"gamma": [...], "g": [[...]]}.
SourceModel source_from_json(const Json& j);
ChannelModel channel_from_json(const Json& j);

// Scenario resolution: {"scenario": "scenario2"} or inline
// {"source": {...}, "channel": {...}}, plus optional overrides for
// lambda_grid, tau_max, horizon, replications, seed.
Scenario scenario_from_json(const Json& j);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace aoii
