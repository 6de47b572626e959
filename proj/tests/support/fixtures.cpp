#include "fixtures.hpp"

#include <algorithm>

#include "assembly_engine/catalog.hpp"
#include "assembly_engine/planner.hpp"

namespace fixtures {

using namespace ae;

Catalog bricks() { return load_catalog(brick_catalog_document()); }
Catalog nodal() { return load_catalog(nodal_catalog_document()); }

std::string data_path(const std::string& relative) { return std::string(AE_DATA_DIR) + "/" + relative; }

Placement at(int id, int type, int x, int y, int z, int quarter_turns) {
  return Placement{id, type, Eigen::Vector3i(x, y, z), quarter_turns};
}

std::vector<StabilityBlock> random_stack(CounterRng& rng, int n) {
  std::vector<StabilityBlock> blocks;
  auto half = [&](int lo, int hi) { return 0.5 * (lo + static_cast<int>(rng.below(hi - lo + 1))); };
  auto clash = [&](const StabilityBlock& b) {
    return std::any_of(blocks.begin(), blocks.end(), [&](const StabilityBlock& o) {
      for (int k = 0; k < 3; ++k) {
        if (b.max()[k] <= o.min[k] || o.max()[k] <= b.min[k]) {
          return false;
        }
      }
      return true;
    });
  };
  for (int k = 0; k < n; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      StabilityBlock b;
      b.id = k;
      b.size = Vec3(half(1, 4), half(1, 4), half(1, 2));
      b.mass = b.size.prod() * (1.0 + static_cast<double>(rng.below(3)));
      if (blocks.empty() || rng.uniform() < 0.25) {
        b.min = Vec3(half(0, 8), half(0, 8), 0.0);
      } else {
        const auto& s = blocks[rng.below(blocks.size())];
        // Any offset that keeps a positive overlap with the support.
        const double ox = 0.5 * (static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                     2 * (b.size.x() + s.size.x()) - 1))) + 1) - b.size.x();
        const double oy = 0.5 * (static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                     2 * (b.size.y() + s.size.y()) - 1))) + 1) - b.size.y();
        b.min = Vec3(s.min.x() + ox, s.min.y() + oy, s.max().z());
      }
      if (!clash(b)) {
        blocks.push_back(b);
        break;
      }
    }
  }
  return blocks;
}

ReplanInstance random_replan_instance(std::uint64_t seed, int index, int max_parts) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    CounterRng rng(seed, streams::kGenerator, static_cast<std::uint64_t>(index), attempt);
    ReplanInstance inst;
    const bool brick_mode = index % 2 == 0;
    inst.catalog = brick_mode ? bricks() : nodal();
    inst.options.bounds.max = {4, 4, 3};
    inst.options.rules.ground_anchoring = brick_mode;

    const int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_parts - 2)));
    const AssemblyState model =
        random_model(inst.catalog, rng, n, inst.options.bounds, brick_mode, 4);
    const int m = static_cast<int>(model.placements.size());
    if (m < 2) {
      continue;
    }
    const Plan plan = brick_mode ? sequence_layered(model, inst.catalog, inst.options.frame)
                                 : sequence_graph(model, *default_base(model), inst.catalog,
                                                  inst.options.frame);
    inst.remaining = std::min(m - 1, 1 + static_cast<int>(rng.below(2)));
    const int built = m - inst.remaining;

    AssemblyState state;
    for (const auto& p : model.placements) {
      state.inventory.counts[p.type_id] += 1;
    }
    for (auto& [type, count] : state.inventory.counts) {
      count += static_cast<int>(rng.below(2));
    }
    for (int i = 0; i < built; ++i) {
      state = apply_placement(state, plan.steps[static_cast<std::size_t>(i)].placement, inst.catalog,
                              inst.options.rules);
    }
    const Placement expected = plan.steps[static_cast<std::size_t>(built)].placement;
    std::vector<Placement> options;
    for (const auto& p : legal_placements(state, inst.catalog, expected.type_id, inst.options.bounds,
                                          inst.options.rules)) {
      if (!(p.cell == expected.cell &&
            canonical_quarter_turns(p, inst.catalog) == canonical_quarter_turns(expected, inst.catalog))) {
        options.push_back(p);
      }
    }
    if (options.empty()) {
      continue;
    }
    Placement actual = options[rng.below(options.size())];
    actual.instance_id = state.next_instance_id();
    inst.current = apply_placement(state, actual, inst.catalog, inst.options.rules);
    inst.deviation = Deviation{expected, actual, built};

    inst.goals.target_height = structure_height(model, inst.catalog);
    inst.goals.max_components = m;
    if (rng.below(3) == 0) {
      for (const auto& p : model.placements) {
        inst.goals.per_type_limits[p.type_id] += 1;
      }
    }
    return inst;
  }
}

Scenario quiet_scenario(const Catalog& catalog, const AssemblyState& model, PlanMode mode,
                        std::uint64_t seed) {
  ScenarioSpec spec;
  spec.name = "quiet";
  spec.seed = seed;
  spec.catalog = catalog;
  spec.model = model;
  spec.mode = mode;
  spec.bounds.max = {6, 6, 6};
  spec.frames = 400;
  return make_scenario(spec);
}

} // namespace fixtures
