#include "assembly_engine/presets.hpp"

#include "assembly_engine/errors.hpp"
#include "assembly_engine/generator.hpp"
#include "assembly_engine/script_author.hpp"

namespace ae {

using json = nlohmann::json;

namespace {

constexpr std::uint64_t kPresetSeed = 20240917;

Catalog bricks() { return load_catalog(brick_catalog_document()); }

AssemblyState brick_model(std::uint64_t seed, int n, const LatticeBounds& bounds) {
  const Catalog catalog = bricks();
  CounterRng rng(seed, streams::kGenerator, 1, 0);
  return random_model(catalog, rng, n, bounds, true);
}

ScenarioSpec base_spec(const std::string& name, Catalog catalog) {
  ScenarioSpec spec;
  spec.name = name;
  spec.seed = kPresetSeed;
  spec.catalog = std::move(catalog);
  spec.bounds.max = {6, 6, 6};
  return spec;
}

} // namespace

std::vector<std::string> preset_names() {
  return {"compliant_bricks", "deviation_bricks", "nodal_graph", "pick_trials", "latency_50"};
}

Scenario preset_scenario(const std::string& name) {
  if (name == "compliant_bricks") {
    auto spec = base_spec(name, bricks());
    spec.model = brick_model(spec.seed, 10, spec.bounds);
    return author_guided(make_scenario(spec)).scenario;
  }
  if (name == "deviation_bricks") {
    auto spec = base_spec(name, bricks());
    spec.seed = kPresetSeed + 1;
    spec.model = brick_model(spec.seed, 6, spec.bounds);
    spec.noise.miss_prob = 0.02;
    spec.noise.jitter_sigma = 1.0;
    spec.distractors = 3;
    return author_guided(make_scenario(spec), 2).scenario;
  }
  if (name == "nodal_graph") {
    auto spec = base_spec(name, load_catalog(nodal_catalog_document()));
    spec.seed = kPresetSeed + 2;
    spec.mode = PlanMode::Graph;
    CounterRng rng(spec.seed, streams::kGenerator, 1, 0);
    spec.model = random_model(spec.catalog, rng, 8, spec.bounds, false);
    spec.noise.miss_prob = 0.02;
    spec.noise.jitter_sigma = 1.0;
    return author_guided(make_scenario(spec)).scenario;
  }
  if (name == "pick_trials") {
    auto spec = base_spec(name, bricks());
    spec.seed = kPresetSeed + 3;
    spec.model.placements = {Placement{0, 8, Eigen::Vector3i(2, 2, 0), 0}};
    spec.distractor_types = {1, 3, 6};
    spec.noise.miss_prob = 0.05;
    spec.noise.jitter_sigma = 3.0;
    return author_pick_trials(make_scenario(spec), 200).scenario;
  }
  if (name == "latency_50") {
    auto spec = base_spec(name, bricks());
    spec.seed = kPresetSeed + 4;
    spec.model = brick_model(spec.seed, 5, spec.bounds);
    spec.distractors = 45;
    spec.noise.miss_prob = 0.05;
    spec.noise.jitter_sigma = 3.0;
    return author_guided(make_scenario(spec)).scenario;
  }
  fail(ErrorCode::ScenarioInvalid, "unknown preset '" + name + "'");
}

json model_document(const std::string& name, const AssemblyState& model) {
  json placements = json::array();
  for (const auto& p : model.placements) {
    placements.push_back(to_json(p));
  }
  return {{"schema_version", 1}, {"name", name}, {"placements", placements}};
}

} // namespace ae
