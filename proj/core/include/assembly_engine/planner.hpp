#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/assembly.hpp"
#include "assembly_engine/twin.hpp"

namespace ae {

enum class StepStatus { Pending, Active, Done, Deviated };
enum class StepAction { Place, Remove };
enum class PlanMode { Layer, Graph };

std::string to_string(StepStatus s);
std::string to_string(StepAction a);
std::string to_string(PlanMode m);
PlanMode plan_mode_from_string(const std::string& s);

struct PlanStep {
  int step_index = 0;
  int instance_id = 0;
  int type_id = 0;
  StepAction action = StepAction::Place;
  Placement placement;
  std::optional<FootprintBox3D> pick_region; // bound at runtime from the twin
  std::optional<int> pick_track_id;
  FootprintBox3D place_region;
  StepStatus status = StepStatus::Pending;
  bool part_not_visible = false;
};

struct Plan {
  std::vector<PlanStep> steps;
  PlanMode mode = PlanMode::Layer;

  /// Index of the first step that is neither done nor deviated.
  std::optional<std::size_t> first_open() const;
  bool complete() const { return !first_open().has_value(); }
};

/// Steps in (z, y, x, instance_id) order. Errors: EmptyModel, OverlappingPlacements.
Plan sequence_layered(const AssemblyState& model, const Catalog& catalog, const LatticeFrame& frame);

/// Connectivity-preserving order starting at `base`: each next step is the
/// frontier instance with the most edges into the already sequenced set,
/// ties to the lower instance id. Errors: EmptyModel, UnknownBase, DisconnectedModel.
Plan sequence_graph(const AssemblyState& model, int base, const Catalog& catalog,
                    const LatticeFrame& frame);

/// Same greedy order, continuing from an already built set of instances. Only
/// the instances outside `built` become steps. Errors: DisconnectedModel.
Plan sequence_graph_from(const AssemblyState& model, const std::set<int>& built,
                         const Catalog& catalog, const LatticeFrame& frame);

/// Lowest-z, then lowest-id placement.
std::optional<int> default_base(const AssemblyState& model);

/// The first open step, bound to the lowest-id live track of its type. When no
/// such track exists the step stays pending with part_not_visible set.
/// Removal steps bind to nothing. Errors: PlanComplete.
PlanStep current_step(const Plan& plan, const TwinState& twin);

nlohmann::json to_json(const PlanStep& s);
nlohmann::json to_json(const Plan& p);

} // namespace ae
