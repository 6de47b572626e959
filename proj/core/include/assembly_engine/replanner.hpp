#pragma once

#include <cstdint>
#include <map>
#include <stop_token>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/assembly.hpp"
#include "assembly_engine/planner.hpp"
#include "assembly_engine/stability.hpp"

namespace ae {

struct GoalSet {
  int target_height = 1; // lattice units; structure top must reach it
  int max_components = 1;
  std::map<int, int> per_type_limits; // type_id -> max count in the final structure
};

struct Deviation {
  Placement expected;
  Placement actual;
  int step_index = 0;
};

struct CandidatePlan {
  AssemblyState final_state;
  Plan continuation;
  int edit_cost = 0;
  std::vector<int> removals; // instance ids
  std::vector<Placement> additions;
  StabilityReport stability;
  bool goal_satisfied = false;
  std::uint64_t state_hash = 0;
};

struct ReplanOptions {
  int w_remove = 2;
  int w_add = 1;
  int k = 3;
  int diversity_min = 1;
  std::size_t node_budget = 200000;
  LatticeBounds bounds;
  PlacementRules rules;
  LatticeFrame frame;
  bool rigid_joints = false;
};

struct ReplanResult {
  std::vector<CandidatePlan> candidates;
  std::size_t expanded = 0;
  bool truncated = false; // budget ran out after some goals were found
};

bool goals_satisfied(const AssemblyState& state, const GoalSet& goals, const Catalog& catalog,
                     const PlacementRules& rules = {});

/// Removes one placement with its edges and returns the part to the inventory.
/// Errors: UnknownInstance, WouldDisconnect.
AssemblyState remove_placement(const AssemblyState& state, int instance_id, const Catalog& catalog,
                               const PlacementRules& rules = {});

/// Instance-id independent identity of a structure: sorted (type, cell,
/// canonical yaw) tuples.
std::vector<std::int64_t> canonical_poses(const AssemblyState& state, const Catalog& catalog);
std::uint64_t canonical_hash(const AssemblyState& state, const Catalog& catalog);

/// Size of the symmetric difference of two structures' canonical poses.
int edit_distance(const AssemblyState& a, const AssemblyState& b, const Catalog& catalog);

/// Tallest structure reachable with the parts on hand, ignoring connectivity:
/// the `max_components` largest part heights stacked, capped by the bounds.
int height_upper_bound(const AssemblyState& state, const GoalSet& goals, const Catalog& catalog,
                       const LatticeBounds& bounds);

/// A* over edit sequences. Each step removes one placement (w_remove) or adds
/// one legal placement (w_add); states are deduplicated by canonical hash. The
/// heuristic is the number of additions the height deficit still needs. All
/// goal states up to the k-th best cost are collected, ranked by (cost,
/// stability score desc, hash) and filtered for pairwise diversity.
/// Errors: InfeasibleGoals, BudgetExceeded, Cancelled.
ReplanResult replan(const AssemblyState& current, const Deviation& deviation, const GoalSet& goals,
                    const Catalog& catalog, const ReplanOptions& options = {},
                    std::stop_token stop = {});

/// Fills in stability for each candidate; order is kept.
std::vector<CandidatePlan> score_candidates(std::vector<CandidatePlan> candidates,
                                            const Catalog& catalog, bool rigid_joints = false);

nlohmann::json to_json(const GoalSet& g);
GoalSet goals_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Deviation& d);
nlohmann::json to_json(const CandidatePlan& c);

} // namespace ae
