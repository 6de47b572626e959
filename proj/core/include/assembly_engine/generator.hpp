#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/assembly.hpp"
#include "assembly_engine/catalog.hpp"
#include "assembly_engine/rng.hpp"
#include "assembly_engine/sim.hpp"

namespace ae {

/// Eight stud-and-socket bricks: 1x1, 1x2, 1x3, 1x4, 1x6, 2x2, 2x3, 2x4.
nlohmann::json brick_catalog_document();
/// Fifteen nodal parts (hubs, struts, brackets, feet) joined peg-to-socket.
nlohmann::json nodal_catalog_document();

/// Connected model grown one random legal placement at a time. Bricks grow
/// with ground anchoring and a bias towards stacking; nodal parts grow through
/// port edges only. Inventory is left unlimited. Fewer than `n` placements are
/// returned only when no legal placement remains.
AssemblyState random_model(const Catalog& catalog, CounterRng& rng, int n,
                           const LatticeBounds& bounds, bool ground_anchoring,
                           int max_types = 0);

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 0;
  Catalog catalog;
  AssemblyState model;
  PlanMode mode = PlanMode::Layer;
  NoiseParams noise;
  ScenarioFlags flags;
  LatticeBounds bounds;
  /// Extra loose parts beyond one per model placement, types drawn at random.
  int distractors = 2;
  /// When non-empty, the extra parts' types instead of `distractors` random ones.
  std::vector<int> distractor_types;
  /// Camera elevation range in degrees; azimuth is drawn from the full circle.
  double elevation_min_deg = 60.0;
  double elevation_max_deg = 75.0;
  int frames = 600;
};

/// Scenario with the loose parts laid out in a grid beside the build area and
/// a static camera framing both. Goals are the model's height and part count.
Scenario make_scenario(const ScenarioSpec& spec);

/// `count` parts of every catalog type.
Inventory unlimited_inventory(const Catalog& catalog, int count = 1000);

} // namespace ae
