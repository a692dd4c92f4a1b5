#pragma once

#include <filesystem>
#include <string>

#include "flockring/simulator.hpp"

namespace flockring {

/// Parses a scenario from JSON text. Omitted "params.d" is derived from the
/// agent count (single/scaling modes) or from the plan (multi-circle mode).
/// Throws ConfigError naming the offending field.
ScenarioConfig parse_scenario(const std::string& json_text);

ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Serializes a validated config back to JSON (round-trips through
/// parse_scenario); used to publish tuned parameter sets.
std::string scenario_to_json(const ScenarioConfig& config);

} // namespace flockring
