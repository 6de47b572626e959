#include "assembly_engine/session.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/scenario_io.hpp"

namespace ae {

using json = nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json to_json(const Command& c) { return {{"type", c.type}, {"payload", c.payload}}; }

Command command_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    fail(ErrorCode::MalformedMessage, "command needs a string type");
  }
  Command c;
  c.type = j.at("type").get<std::string>();
  c.payload = j.value("payload", json::object());
  return c;
}

json intent_metrics(const std::vector<HandKeyframe>& script,
                    const std::vector<InteractionEvent>& events) {
  std::vector<std::size_t> labelled;
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (!script[i].intent.empty()) {
      labelled.push_back(i);
    }
  }
  std::map<std::string, std::pair<int, int>> tally; // kind -> (expected, met)
  for (std::size_t n = 0; n < labelled.size(); ++n) {
    const auto& key = script[labelled[n]];
    const int begin = key.frame;
    const int end = n + 1 < labelled.size() ? script[labelled[n + 1]].frame
                                            : std::numeric_limits<int>::max();
    const bool met = std::any_of(events.begin(), events.end(), [&](const InteractionEvent& e) {
      return to_string(e.kind) == key.intent && e.frame >= begin && e.frame < end;
    });
    auto& t = tally[key.intent];
    t.first += 1;
    t.second += met ? 1 : 0;
  }
  auto rate = [&](const std::string& kind) -> json {
    const auto it = tally.find(kind);
    if (it == tally.end() || it->second.first == 0) {
      return nullptr;
    }
    return static_cast<double>(it->second.second) / it->second.first;
  };
  json by_kind = json::object();
  for (const auto& [kind, t] : tally) {
    by_kind[kind] = {{"expected", t.first}, {"met", t.second}};
  }
  int place_expected = 0;
  int place_met = 0;
  for (const char* k : {"place_correct", "place_deviation"}) {
    if (const auto it = tally.find(k); it != tally.end()) {
      place_expected += it->second.first;
      place_met += it->second.second;
    }
  }
  return {{"by_kind", by_kind},
          {"pick_confirmation_rate", rate("pick_correct")},
          {"wrong_pick_flag_rate", rate("pick_wrong")},
          {"place_confirmation_rate",
           place_expected ? json(static_cast<double>(place_met) / place_expected) : json(nullptr)}};
}

Session::Session(std::string session_id) : id_(std::move(session_id)) {}

const Scenario& Session::scenario() const {
  require_loaded();
  return *scenario_;
}

void Session::require_loaded() const {
  if (!scenario_) {
    fail(ErrorCode::SessionNotLoaded);
  }
}

bool Session::finished() const { return loaded() && cursor_ > scenario_->last_frame(); }

std::optional<PlanStep> Session::active_step() const {
  if (!loaded() || !candidates_.empty() || plan_.complete()) {
    return std::nullopt;
  }
  return current_step(plan_, twin_);
}

std::vector<SessionEvent> Session::apply(const Command& command) {
  auto out = run_command(command);
  if (command.type == "tick" && !log_.empty() && log_.back().type == "tick") {
    log_.back().payload["frames"] =
        log_.back().payload.at("frames").get<int>() + command.payload.at("frames").get<int>();
  } else {
    log_.push_back(command);
  }
  return out;
}

std::vector<SessionEvent> Session::load_scenario(const Scenario& scenario) {
  return apply({"load_scenario", {{"scenario", scenario_to_json(scenario)}}});
}

std::vector<SessionEvent> Session::tick(int frames) { return apply({"tick", {{"frames", frames}}}); }

std::vector<SessionEvent> Session::hand(const Vec3& position, HandSide side) {
  return apply({"hand", {{"position", to_json(position)}, {"hand", to_string(side)}}});
}

std::vector<SessionEvent> Session::select_candidate(int index) {
  return apply({"select_candidate", {{"index", index}}});
}

std::vector<SessionEvent> Session::run_command(const Command& command) {
  std::vector<SessionEvent> out;
  const auto& p = command.payload;
  try {
    if (command.type == "load_scenario") {
      if (!p.contains("scenario")) {
        fail(ErrorCode::MalformedMessage, "load_scenario needs a scenario");
      }
      Scenario s = scenario_from_json(p.at("scenario"));
      *this = Session(id_);
      scenario_ = std::move(s);
      twin_config_ = scenario_->twin_config();
      monitor_config_.dwell_frames = scenario_->flags.dwell_frames;
      monitor_config_.region_margin = scenario_->flags.region_margin;
      monitor_config_.allow_deviant_pick = scenario_->flags.allow_deviant_pick;
      monitor_config_.error_feedback = scenario_->flags.error_feedback;
      assembly_ = initial_assembly(*scenario_);
      plan_ = initial_plan(*scenario_);
      out.push_back(step_instruction());
      out.push_back(stability_report());
      return out;
    }
    if (command.type == "tick") {
      require_loaded();
      const int frames = p.at("frames").get<int>();
      if (frames < 0) {
        fail(ErrorCode::MalformedMessage, "tick frames must be non-negative");
      }
      for (int i = 0; i < frames && !finished(); ++i) {
        process_frame(out);
      }
      out.push_back(twin_snapshot());
      out.push_back(step_instruction());
      if (finished()) {
        out.push_back({"metrics", metrics_json()});
      }
      return out;
    }
    if (command.type == "hand") {
      require_loaded();
      live_hand_ = vec_from_json(p.at("position"));
      live_side_ = hand_side_from_string(p.value("hand", std::string("right")));
      if (!finished()) {
        process_frame(out);
      }
      out.push_back(twin_snapshot());
      out.push_back(step_instruction());
      return out;
    }
    if (command.type == "select_candidate") {
      require_loaded();
      const int index = p.at("index").get<int>();
      if (candidates_.empty()) {
        fail(ErrorCode::NoPendingCandidates);
      }
      if (index < 0 || index >= static_cast<int>(candidates_.size())) {
        fail(ErrorCode::IndexOutOfRange,
             std::to_string(index) + " of " + std::to_string(candidates_.size()));
      }
      plan_ = candidates_[static_cast<std::size_t>(index)].continuation;
      candidates_.clear();
      deviation_.reset();
      ++version_;
      ++counters_.selections;
      out.push_back(step_instruction());
      return out;
    }
    if (command.type == "mode_flags") {
      require_loaded();
      // Everything is validated before anything changes.
      ScenarioFlags flags = scenario_->flags;
      flags.error_feedback = p.value("error_feedback", flags.error_feedback);
      flags.allow_deviant_pick = p.value("allow_deviant_pick", flags.allow_deviant_pick);
      flags.rigid_joints = p.value("rigid_joints", flags.rigid_joints);
      flags.dwell_frames = p.value("dwell_frames", flags.dwell_frames);
      flags.region_margin = p.value("region_margin", flags.region_margin);
      flags.auto_select = p.value("auto_select", flags.auto_select);
      if (flags.dwell_frames < 1 || flags.region_margin < 0.0) {
        fail(ErrorCode::MalformedMessage, "flag out of range");
      }
      std::optional<PlanMode> mode;
      if (p.contains("mode")) {
        if (cursor_ != 0 || !assembly_.empty()) {
          fail(ErrorCode::MalformedMessage, "mode can only change before the first frame");
        }
        mode = plan_mode_from_string(p.at("mode").get<std::string>());
      }
      scenario_->flags = flags;
      monitor_config_.dwell_frames = flags.dwell_frames;
      monitor_config_.region_margin = flags.region_margin;
      monitor_config_.allow_deviant_pick = flags.allow_deviant_pick;
      monitor_config_.error_feedback = flags.error_feedback;
      if (mode) {
        scenario_->mode = *mode;
        plan_ = initial_plan(*scenario_);
      }
      ++version_;
      out.push_back(step_instruction());
      out.push_back(stability_report());
      return out;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedMessage, e.what());
  }
  fail(ErrorCode::MalformedMessage, "unknown command '" + command.type + "'");
}

const std::vector<PlacementRegion>& Session::regions_for(const std::optional<PlanStep>& active) {
  const auto key = std::make_tuple(version_, monitor_.held_type, active ? active->step_index : -1);
  if (regions_key_ != key) {
    regions_.clear();
    if (active) {
      regions_ = placement_regions(assembly_, scenario_->catalog, active, monitor_.held_type,
                                   scenario_->lattice, scenario_->bounds, scenario_->rules(),
                                   monitor_config_.region_margin);
    }
    regions_key_ = key;
  }
  return regions_;
}

void Session::process_frame(std::vector<SessionEvent>& out) {
  const int frame = cursor_;
  const auto t0 = std::chrono::steady_clock::now();

  const auto [camera, detections] = render_detections(*scenario_, frame, hidden_);
  twin_ = ingest_frame(twin_, twin_config_, frame, camera, detections);

  std::optional<HandSample> sample;
  if (live_hand_) {
    sample = HandSample{frame, *live_hand_, live_side_};
  } else if (scenario_->hand_script && !scenario_->hand_script->empty()) {
    sample = scripted_hand(*scenario_, frame);
  }

  std::vector<InteractionEvent> events;
  if (sample) {
    last_hand_ = sample->position;
    const auto active = active_step();
    static const std::vector<PlacementRegion> kNone;
    const auto& regions = monitor_.phase == Phase::Holding ? regions_for(active) : kNone;
    auto obs = observe_hand(monitor_, *sample, twin_, active, regions, monitor_config_);
    monitor_ = std::move(obs.state);
    events = std::move(obs.events);
  }
  const auto t1 = std::chrono::steady_clock::now();
  latencies_ms_.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());

  ++cursor_;
  ++counters_.frames;
  for (const auto& ev : events) {
    handle_event(ev, out);
  }
}

void Session::consume_held_part(int track_id, int instance_id) {
  const Track* track = twin_.find(track_id);
  if (track == nullptr) {
    return;
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenario_->layout.size(); ++i) {
    if (hidden_.count(static_cast<int>(i))) {
      continue;
    }
    const double d = (scenario_->layout[i].box.center - track->smoothed_center).norm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) {
    hidden_.insert(best);
    instance_to_part_[instance_id] = best;
  }
  twin_ = remove_track(twin_, track_id);
}

void Session::handle_event(const InteractionEvent& ev, std::vector<SessionEvent>& out) {
  interactions_.push_back(ev);
  const char* marker = ev.marker == Marker::Checkmark ? "check"
                       : ev.marker == Marker::Cross   ? "cross"
                                                      : "none";
  out.push_back({"feedback",
                 {{"kind", marker}, {"event", to_json(ev)}, {"position", to_json(ev.marker_position)}}});

  const auto& catalog = scenario_->catalog;
  const auto rules = scenario_->rules();
  auto error_event = [&](const Error& e) {
    ++counters_.errors;
    out.push_back({"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}});
  };
  const auto open = plan_.first_open();

  switch (ev.kind) {
  case EventKind::PickWrong:
    ++counters_.pick_wrong;
    return;
  case EventKind::Release:
    ++counters_.releases;
    return;
  case EventKind::PickCorrect: {
    ++counters_.pick_correct;
    if (!open || plan_.steps[*open].action != StepAction::Remove) {
      return;
    }
    auto& step = plan_.steps[*open];
    try {
      assembly_ = remove_placement(assembly_, step.instance_id, catalog, rules);
    } catch (const Error& e) {
      error_event(e);
      return;
    }
    step.status = StepStatus::Done;
    if (const auto it = instance_to_part_.find(step.instance_id); it != instance_to_part_.end()) {
      hidden_.erase(it->second);
      instance_to_part_.erase(it);
    }
    ++counters_.steps_completed;
    ++version_;
    out.push_back(stability_report());
    return;
  }
  case EventKind::PlaceCorrect: {
    ++counters_.place_correct;
    if (!open) {
      return;
    }
    auto& step = plan_.steps[*open];
    try {
      assembly_ = apply_placement(assembly_, step.placement, catalog, rules);
    } catch (const Error& e) {
      error_event(e);
      return;
    }
    step.status = StepStatus::Done;
    consume_held_part(ev.track_id.value_or(-1), step.instance_id);
    ++counters_.steps_completed;
    ++version_;
    out.push_back(stability_report());
    if (plan_complete()) {
      out.push_back({"metrics", metrics_json()});
    }
    return;
  }
  case EventKind::PlaceDeviation: {
    ++counters_.place_deviation;
    if (!open || !ev.placement) {
      return;
    }
    auto& step = plan_.steps[*open];
    Placement actual = *ev.placement;
    actual.instance_id = assembly_.next_instance_id();
    try {
      assembly_ = apply_placement(assembly_, actual, catalog, rules);
    } catch (const Error& e) {
      error_event(e);
      return;
    }
    step.status = StepStatus::Deviated;
    consume_held_part(ev.track_id.value_or(-1), actual.instance_id);
    ++counters_.deviations;
    ++version_;
    deviation_ = Deviation{step.placement, actual, step.step_index};
    out.push_back(stability_report());

    ReplanOptions options;
    options.bounds = scenario_->bounds;
    options.rules = rules;
    options.frame = scenario_->lattice;
    options.rigid_joints = scenario_->flags.rigid_joints;
    ++counters_.replans;
    try {
      auto result = replan(assembly_, *deviation_, scenario_->goals, catalog, options);
      candidates_ = std::move(result.candidates);
      json cands = json::array();
      for (const auto& c : candidates_) {
        cands.push_back(to_json(c));
      }
      out.push_back({"candidates",
                     {{"deviation", to_json(*deviation_)},
                      {"candidates", cands},
                      {"expanded", result.expanded},
                      {"truncated", result.truncated}}});
    } catch (const Error& e) {
      ++counters_.replan_failures;
      deviation_.reset();
      error_event(e);
    }
    return;
  }
  }
}

SessionEvent Session::step_instruction() const {
  const auto active = active_step();
  int done = 0;
  for (const auto& s : plan_.steps) {
    done += s.status == StepStatus::Done ? 1 : 0;
  }
  return {"step_instruction",
          {{"frame", cursor_ - 1},
           {"step", active ? to_json(*active) : json(nullptr)},
           {"plan_complete", plan_complete()},
           {"awaiting_selection", !candidates_.empty()},
           {"mode", to_string(plan_.mode)},
           {"steps_done", done},
           {"steps_total", plan_.steps.size()}}};
}

SessionEvent Session::twin_snapshot() const {
  json tracks = json::array();
  for (const auto& t : twin_.tracks) {
    tracks.push_back(to_json(t));
  }
  return {"twin_snapshot",
          {{"frame", twin_.frame},
           {"tracks", tracks},
           {"phase", to_string(monitor_.phase)},
           {"held_track", monitor_.held_track},
           {"hand", last_hand_ ? to_json(*last_hand_) : json(nullptr)},
           {"structure", to_json(assembly_)}}};
}

SessionEvent Session::stability_report() const {
  return {"stability_report",
          to_json(analyze(assembly_, scenario_->catalog, scenario_->flags.rigid_joints))};
}

json Session::state_json() const {
  json cands = json::array();
  for (const auto& c : candidates_) {
    cands.push_back(to_json(c));
  }
  json parts = json::object();
  for (const auto& [inst, part] : instance_to_part_) {
    parts[std::to_string(inst)] = part;
  }
  return {{"loaded", loaded()},
          {"scenario", loaded() ? json(scenario_->name) : json(nullptr)},
          {"cursor", cursor_},
          {"twin", to_json(twin_)},
          {"assembly", to_json(assembly_)},
          {"plan", to_json(plan_)},
          {"monitor", to_json(monitor_)},
          {"candidates", cands},
          {"deviation", deviation_ ? to_json(*deviation_) : json(nullptr)},
          {"hidden", hidden_},
          {"instance_to_part", parts},
          {"live_hand", live_hand_ ? to_json(*live_hand_) : json(nullptr)},
          {"interactions", interactions_.size()},
          {"counters",
           {{"frames", counters_.frames},
            {"steps_completed", counters_.steps_completed},
            {"deviations", counters_.deviations},
            {"replans", counters_.replans},
            {"selections", counters_.selections}}}};
}

std::uint64_t Session::state_hash() const { return fnv1a64(state_json().dump()); }

json Session::metrics_json() const {
  require_loaded();
  const auto& s = *scenario_;
  json j{{"schema_version", 1},
         {"scenario", s.name},
         {"seed", s.seed},
         {"frames", counters_.frames},
         {"steps_completed", counters_.steps_completed},
         {"plan_complete", plan_complete()},
         {"goal_satisfied", goals_satisfied(assembly_, s.goals, s.catalog, s.rules())},
         {"placements", assembly_.placements.size()},
         {"events",
          {{"pick_correct", counters_.pick_correct},
           {"pick_wrong", counters_.pick_wrong},
           {"place_correct", counters_.place_correct},
           {"place_deviation", counters_.place_deviation},
           {"release", counters_.releases}}},
         {"deviations", counters_.deviations},
         {"replans", counters_.replans},
         {"replan_failures", counters_.replan_failures},
         {"selections", counters_.selections},
         {"errors", counters_.errors},
         {"final_state_hash", hex64(state_hash())}};
  j["intent"] = s.hand_script ? intent_metrics(*s.hand_script, interactions_) : json(nullptr);
  return j;
}

} // namespace ae
