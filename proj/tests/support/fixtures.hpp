#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assembly_engine/generator.hpp"
#include "assembly_engine/replanner.hpp"
#include "assembly_engine/rng.hpp"
#include "assembly_engine/sim.hpp"
#include "assembly_engine/stability.hpp"

namespace fixtures {

ae::Catalog bricks();
ae::Catalog nodal();
std::string data_path(const std::string& relative);

ae::Placement at(int id, int type, int x, int y, int z, int quarter_turns = 0);

/// Random stack of at most `n` axis-aligned blocks on half-unit positions:
/// each block rests on the table or on top of an earlier block, overhangs
/// included, without interpenetration.
std::vector<ae::StabilityBlock> random_stack(ae::CounterRng& rng, int n);

/// Deviation scenario at desk scale: a random model (at most `max_parts`
/// placements of at most four types) is partly built, then the next part is
/// put down in a legal but different pose. Goals are the model's height and
/// part count, so the model itself stays reachable.
struct ReplanInstance {
  ae::Catalog catalog;
  ae::AssemblyState current;
  ae::Deviation deviation;
  ae::GoalSet goals;
  ae::ReplanOptions options;
  int remaining = 0; // model steps left after the deviation
};
ReplanInstance random_replan_instance(std::uint64_t seed, int index, int max_parts = 7);

/// Small zero-noise scenario from a model, camera looking down from 60 to 75
/// degrees elevation.
ae::Scenario quiet_scenario(const ae::Catalog& catalog, const ae::AssemblyState& model,
                            ae::PlanMode mode, std::uint64_t seed = 7);

} // namespace fixtures
