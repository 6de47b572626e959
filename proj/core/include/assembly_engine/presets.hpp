#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/sim.hpp"

namespace ae {

/// Names of the scenarios shipped under data/scenarios.
std::vector<std::string> preset_names();

/// Builds a shipped scenario, hand script included. Errors: ScenarioInvalid
/// for unknown names.
Scenario preset_scenario(const std::string& name);

/// Model document: {"schema_version", "name", "placements"}.
nlohmann::json model_document(const std::string& name, const AssemblyState& model);

} // namespace ae
