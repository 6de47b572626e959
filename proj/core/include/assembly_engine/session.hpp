#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/monitor.hpp"
#include "assembly_engine/planner.hpp"
#include "assembly_engine/replanner.hpp"
#include "assembly_engine/sim.hpp"
#include "assembly_engine/stability.hpp"
#include "assembly_engine/twin.hpp"

namespace ae {

/// Client command; the session's event log is the sequence of applied commands.
struct Command {
  std::string type; // load_scenario | tick | hand | select_candidate | mode_flags
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Command&) const = default;
};

/// Outbound message body: twin_snapshot, step_instruction, feedback,
/// candidates, stability_report, metrics or error.
struct SessionEvent {
  std::string type;
  nlohmann::json payload;
};

struct Counters {
  int frames = 0;
  int steps_completed = 0;
  int pick_correct = 0;
  int pick_wrong = 0;
  int place_correct = 0;
  int place_deviation = 0;
  int releases = 0;
  int deviations = 0;
  int replans = 0;
  int replan_failures = 0;
  int selections = 0;
  int errors = 0;
};

class Session {
public:
  explicit Session(std::string session_id = "local");

  /// Applies one command and appends it to the log. Consecutive ticks are
  /// merged in the log since tick(a) then tick(b) equals tick(a + b).
  /// Errors: SessionNotLoaded, MalformedMessage, NoPendingCandidates,
  /// IndexOutOfRange, ScenarioInvalid.
  std::vector<SessionEvent> apply(const Command& command);

  std::vector<SessionEvent> load_scenario(const Scenario& scenario);
  std::vector<SessionEvent> tick(int frames = 1);
  /// Live hand sample; from now on scripted hands are ignored. Advances one frame.
  std::vector<SessionEvent> hand(const Vec3& position, HandSide side = HandSide::Right);
  std::vector<SessionEvent> select_candidate(int index);

  bool loaded() const { return scenario_.has_value(); }
  /// True once every frame of the camera trajectory has been processed.
  bool finished() const;
  bool plan_complete() const { return loaded() && plan_.complete() && candidates_.empty(); }

  const std::string& id() const { return id_; }
  const Scenario& scenario() const;
  const TwinState& twin() const { return twin_; }
  const AssemblyState& assembly() const { return assembly_; }
  const Plan& plan() const { return plan_; }
  const MonitorState& monitor() const { return monitor_; }
  const std::vector<CandidatePlan>& candidates() const { return candidates_; }
  const std::vector<Command>& log() const { return log_; }
  const std::vector<InteractionEvent>& interactions() const { return interactions_; }
  const Counters& counters() const { return counters_; }
  const std::set<int>& hidden_parts() const { return hidden_; }
  int cursor() const { return cursor_; }
  /// Per-frame ingest plus monitor time in milliseconds; not part of the state.
  const std::vector<double>& latencies_ms() const { return latencies_ms_; }

  std::optional<PlanStep> active_step() const;
  nlohmann::json state_json() const;
  /// FNV-1a 64 over the canonical state document.
  std::uint64_t state_hash() const;
  nlohmann::json metrics_json() const;

private:
  std::vector<SessionEvent> run_command(const Command& command);
  void process_frame(std::vector<SessionEvent>& out);
  void handle_event(const InteractionEvent& ev, std::vector<SessionEvent>& out);
  void consume_held_part(int track_id, int instance_id);
  void invalidate_regions() { regions_key_.reset(); }
  const std::vector<PlacementRegion>& regions_for(const std::optional<PlanStep>& active);
  SessionEvent step_instruction() const;
  SessionEvent twin_snapshot() const;
  SessionEvent stability_report() const;
  void require_loaded() const;

  std::string id_;
  std::optional<Scenario> scenario_;
  TwinConfig twin_config_;
  MonitorConfig monitor_config_;
  TwinState twin_;
  AssemblyState assembly_;
  Plan plan_;
  MonitorState monitor_;
  std::vector<CandidatePlan> candidates_;
  std::optional<Deviation> deviation_;
  std::set<int> hidden_;                // layout indices no longer on the table
  std::map<int, int> instance_to_part_; // instance id -> layout index
  std::optional<Vec3> live_hand_;
  HandSide live_side_ = HandSide::Right;
  std::optional<Vec3> last_hand_;
  int cursor_ = 0;
  std::vector<Command> log_;
  std::vector<InteractionEvent> interactions_;
  Counters counters_;
  std::vector<double> latencies_ms_;
  int version_ = 0; // bumped whenever the structure or plan changes
  std::optional<std::tuple<int, int, int>> regions_key_;
  std::vector<PlacementRegion> regions_;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Script intents scored against the monitor events: an intent is met when an
/// event of that kind occurs between its keyframe and the next intent keyframe.
nlohmann::json intent_metrics(const std::vector<HandKeyframe>& script,
                              const std::vector<InteractionEvent>& events);

nlohmann::json to_json(const Command& c);
Command command_from_json(const nlohmann::json& j);

} // namespace ae
