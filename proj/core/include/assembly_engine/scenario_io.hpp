#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "assembly_engine/sim.hpp"

namespace ae {

/// Parses a scenario document. `catalog` and `model` may be inline objects or
/// paths resolved against `base_dir`. When the document has no `inventory`,
/// the inventory is the loose-part count per type. Any failure, including an
/// unsequenceable target model, raises ScenarioInvalid.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario_file(const std::filesystem::path& path);

/// Self-contained document with the catalog and model inlined.
nlohmann::json scenario_to_json(const Scenario& scenario);
void save_scenario_file(const Scenario& scenario, const std::filesystem::path& path);

/// Session start state: empty structure holding the scenario's inventory.
AssemblyState initial_assembly(const Scenario& scenario);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Vec3 vec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CameraPose& pose);
CameraPose camera_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HandKeyframe& k);
HandKeyframe hand_keyframe_from_json(const nlohmann::json& j);

} // namespace ae
