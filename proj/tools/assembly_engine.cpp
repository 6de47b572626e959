#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/headless.hpp"
#include "assembly_engine/logging.hpp"
#include "assembly_engine/replay.hpp"
#include "assembly_engine/scenario_io.hpp"
#include "assembly_engine/server.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitScenarioInvalid = 2;
constexpr int kExitReplayDiverged = 3;

int exit_code(const ae::Error& e) {
  switch (e.code()) {
  case ae::ErrorCode::ScenarioInvalid: return kExitScenarioInvalid;
  case ae::ErrorCode::ReplayDiverged: return kExitReplayDiverged;
  default: return kExitFailure;
  }
}

ae::Scenario load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  ae::Scenario s;
  try {
    s = ae::load_scenario_file(path);
  } catch (const ae::Error& e) {
    // An unreadable scenario is as unusable as a malformed one.
    if (e.code() == ae::ErrorCode::IoFailure) {
      ae::fail(ae::ErrorCode::ScenarioInvalid, e.what());
    }
    throw;
  }
  if (seed) {
    s.seed = *seed;
  }
  return s;
}

} // namespace

int main(int argc, char** argv) {
  ae::init_logging();
  CLI::App app{"Deterministic adaptive assembly-guidance engine"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir;
  bool verify = false;
  auto* run = app.add_subcommand("run", "Play a scenario headless and print its metrics");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Directory for metrics, timing, events and replay");
  run->add_option("--seed-override", seed_override, "Replace the scenario seed");
  run->add_flag("--verify", verify, "Re-import the replay log and check its state hash");

  std::string bind = "127.0.0.1:8765";
  std::string scenario_root;
  auto* serve = app.add_subcommand("serve", "Serve sessions over WebSocket");
  serve->add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  serve->add_option("--scenario-root", scenario_root,
                    "Directory that load_scenario {\"path\"} requests resolve against");

  std::string replay_path;
  auto* verify_cmd = app.add_subcommand("verify", "Replay a log and check its final state hash");
  verify_cmd->add_option("replay", replay_path, "replay.jsonl file")->required();

  int repeat = 1;
  auto* bench = app.add_subcommand("bench", "Per-frame latency statistics for a scenario");
  bench->add_option("--scenario", scenario_path, "Scenario file")->required();
  bench->add_option("--seed-override", seed_override, "Replace the scenario seed");
  bench->add_option("--repeat", repeat, "Runs to pool")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ae::RunOptions options;
      if (!out_dir.empty()) {
        options.out_dir = out_dir;
      }
      options.verify = verify;
      const auto result = ae::run_headless(load(scenario_path, seed_override), options);
      std::cout << result.metrics.dump(2) << '\n';
      return 0;
    }
    if (*serve) {
      const auto [host, port] = ae::parse_bind(bind);
      std::optional<std::filesystem::path> root;
      if (!scenario_root.empty()) {
        root = scenario_root;
      }
      ae::Server server(host, port, root);
      std::cerr << "listening on " << host << ":" << server.port() << '\n';
      server.run();
      return 0;
    }
    if (*verify_cmd) {
      const auto hash = ae::verify_log(ae::import_log_file(replay_path));
      std::cout << "ok " << ae::hex64(hash) << '\n';
      return 0;
    }
    if (*bench) {
      const auto scenario = load(scenario_path, seed_override);
      std::vector<double> samples;
      double wall_ms = 0.0;
      for (int i = 0; i < repeat; ++i) {
        const auto result = ae::run_headless(scenario);
        wall_ms += result.timing.at("wall_ms").get<double>();
        samples.insert(samples.end(), result.latencies_ms.begin(), result.latencies_ms.end());
      }
      nlohmann::json report{{"scenario", scenario.name},
                            {"runs", repeat},
                            {"wall_ms", wall_ms},
                            {"frame_latency", ae::to_json(ae::latency_stats(samples))}};
      std::cout << report.dump(2) << '\n';
      return 0;
    }
  } catch (const ae::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
