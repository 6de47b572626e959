#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/session.hpp"

namespace ae {

struct LatencyStats {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

/// Nearest-rank percentiles.
LatencyStats latency_stats(std::vector<double> samples);
nlohmann::json to_json(const LatencyStats& s);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool verify = false;
};

struct RunResult {
  nlohmann::json metrics; // deterministic
  nlohmann::json timing;  // wall clock; varies run to run
  std::uint64_t final_state_hash = 0;
  std::string replay;
  std::vector<SessionEvent> events;
  std::vector<double> latencies_ms; // per frame, ingest plus monitor
};

/// Plays the scenario to its last frame, selecting candidate
/// `flags.auto_select` whenever a replan offers some. With an output
/// directory, writes metrics.json, timing.json, events.jsonl and replay.jsonl.
/// Errors: ReplayDiverged (with `verify`), IoFailure.
RunResult run_headless(const Scenario& scenario, const RunOptions& options = {});

} // namespace ae
