#include "assembly_engine/headless.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "assembly_engine/replay.hpp"
#include "assembly_engine/scenario_io.hpp"

namespace ae {

using json = nlohmann::json;

LatencyStats latency_stats(std::vector<double> samples) {
  LatencyStats s;
  if (samples.empty()) {
    return s;
  }
  std::sort(samples.begin(), samples.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::clamp<std::size_t>(idx, 1, samples.size()) - 1];
  };
  s.count = samples.size();
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.count);
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.p99 = rank(0.99);
  s.max = samples.back();
  return s;
}

json to_json(const LatencyStats& s) {
  return {{"count", s.count}, {"mean_ms", s.mean}, {"p50_ms", s.p50},
          {"p95_ms", s.p95},  {"p99_ms", s.p99},   {"max_ms", s.max}};
}

RunResult run_headless(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Session session;
  RunResult result;
  json last_step;

  auto keep = [&](std::vector<SessionEvent> events) {
    for (auto& ev : events) {
      if (ev.type == "twin_snapshot") {
        continue;
      }
      if (ev.type == "step_instruction") {
        json key = ev.payload;
        key.erase("frame");
        if (key == last_step) {
          continue;
        }
        last_step = std::move(key);
      }
      result.events.push_back(std::move(ev));
    }
  };

  keep(session.load_scenario(scenario));
  while (!session.finished()) {
    keep(session.tick(1));
    if (!session.candidates().empty()) {
      const int n = static_cast<int>(session.candidates().size());
      keep(session.select_candidate(std::min(scenario.flags.auto_select, n - 1)));
    }
  }

  result.final_state_hash = session.state_hash();
  result.latencies_ms = session.latencies_ms();
  result.metrics = session.metrics_json();
  result.replay = export_log(session);
  if (options.verify) {
    verify_log(import_log(result.replay));
  }
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  result.timing = {{"schema_version", 1},
                   {"wall_ms", wall_ms},
                   {"frame_latency", to_json(latency_stats(session.latencies_ms()))}};

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    write_text_file(dir / "metrics.json", result.metrics.dump(2) + "\n");
    write_text_file(dir / "timing.json", result.timing.dump(2) + "\n");
    write_text_file(dir / "replay.jsonl", result.replay);
    std::ostringstream events;
    std::int64_t seq = 0;
    for (const auto& ev : result.events) {
      events << json{{"type", ev.type}, {"seq", seq++}, {"payload", ev.payload}}.dump() << '\n';
    }
    write_text_file(dir / "events.jsonl", events.str());
  }
  return result;
}

} // namespace ae
