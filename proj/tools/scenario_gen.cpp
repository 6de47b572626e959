#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/generator.hpp"
#include "assembly_engine/logging.hpp"
#include "assembly_engine/presets.hpp"
#include "assembly_engine/scenario_io.hpp"
#include "assembly_engine/script_author.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  ae::init_logging();
  CLI::App app{"Scenario generator for the assembly engine"};
  app.require_subcommand(1);

  std::string out = "data";
  auto* presets = app.add_subcommand("presets", "Write the shipped catalogs, models and scenarios");
  presets->add_option("--out", out, "Data directory")->capture_default_str();

  std::string catalog = "bricks";
  std::string mode = "layer";
  std::string target;
  int parts = 6;
  int distractors = 2;
  std::uint64_t seed = 1;
  double miss = 0.0;
  double jitter = 0.0;
  std::optional<int> deviate_at;
  std::optional<int> pick_trials;
  auto* random = app.add_subcommand("random", "Write one random scripted scenario");
  random->add_option("--out", target, "Scenario file")->required();
  random->add_option("--catalog", catalog, "bricks or nodal")
      ->check(CLI::IsMember({"bricks", "nodal"}))
      ->capture_default_str();
  random->add_option("--mode", mode, "layer or graph")
      ->check(CLI::IsMember({"layer", "graph"}))
      ->capture_default_str();
  random->add_option("--parts", parts, "Model placements")->capture_default_str();
  random->add_option("--distractors", distractors, "Extra loose parts")->capture_default_str();
  random->add_option("--seed", seed, "Generator and scenario seed")->capture_default_str();
  random->add_option("--miss", miss, "Detection miss probability");
  random->add_option("--jitter", jitter, "Bbox jitter sigma in px");
  random->add_option("--deviate-at", deviate_at, "Plan step to place off target");
  random->add_option("--pick-trials", pick_trials, "Script pick trials instead of an assembly");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*presets) {
      const fs::path root(out);
      ae::write_text_file(root / "catalogs" / "bricks.json",
                          ae::brick_catalog_document().dump(2) + "\n");
      ae::write_text_file(root / "catalogs" / "nodal.json",
                          ae::nodal_catalog_document().dump(2) + "\n");
      for (const auto& name : ae::preset_names()) {
        const auto scenario = ae::preset_scenario(name);
        ae::write_text_file(root / "models" / (name + ".json"),
                            ae::model_document(name, scenario.model).dump(2) + "\n");
        ae::save_scenario_file(scenario, root / "scenarios" / (name + ".json"));
        std::cout << name << ": " << scenario.last_frame() + 1 << " frames\n";
      }
      return 0;
    }
    ae::ScenarioSpec spec;
    spec.name = fs::path(target).stem().string();
    spec.seed = seed;
    spec.catalog = ae::load_catalog(catalog == "nodal" ? ae::nodal_catalog_document()
                                                       : ae::brick_catalog_document());
    spec.mode = ae::plan_mode_from_string(mode);
    spec.bounds.max = {6, 6, 6};
    spec.distractors = distractors;
    spec.noise.miss_prob = miss;
    spec.noise.jitter_sigma = jitter;
    ae::CounterRng rng(seed, ae::streams::kGenerator, 1, 0);
    spec.model = ae::random_model(spec.catalog, rng, parts, spec.bounds, catalog == "bricks");
    const auto base = ae::make_scenario(spec);
    const auto authored = pick_trials ? ae::author_pick_trials(base, *pick_trials)
                                      : ae::author_guided(base, deviate_at);
    ae::save_scenario_file(authored.scenario, target);
    std::cout << target << ": " << authored.scenario.last_frame() + 1 << " frames, "
              << authored.events.size() << " events\n";
    return 0;
  } catch (const ae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ae::ErrorCode::ScenarioInvalid ? 2 : 1;
  }
}
