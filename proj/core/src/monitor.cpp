#include "assembly_engine/monitor.hpp"

#include <algorithm>
#include <limits>

#include "assembly_engine/errors.hpp"

namespace ae {

std::string to_string(EventKind k) {
  switch (k) {
  case EventKind::PickCorrect: return "pick_correct";
  case EventKind::PickWrong: return "pick_wrong";
  case EventKind::PlaceCorrect: return "place_correct";
  case EventKind::PlaceDeviation: return "place_deviation";
  case EventKind::Release: return "release";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& s) {
  if (s == "pick_correct") return EventKind::PickCorrect;
  if (s == "pick_wrong") return EventKind::PickWrong;
  if (s == "place_correct") return EventKind::PlaceCorrect;
  if (s == "place_deviation") return EventKind::PlaceDeviation;
  if (s == "release") return EventKind::Release;
  fail(ErrorCode::MalformedDocument, "unknown event kind '" + s + "'");
}

std::string to_string(HandSide h) { return h == HandSide::Left ? "left" : "right"; }

HandSide hand_side_from_string(const std::string& s) {
  if (s == "left") return HandSide::Left;
  if (s == "right") return HandSide::Right;
  fail(ErrorCode::MalformedDocument, "hand must be 'left' or 'right'");
}

std::string to_string(Phase p) {
  switch (p) {
  case Phase::Idle: return "idle";
  case Phase::Holding: return "holding";
  case Phase::Placed: return "placed";
  }
  return "?";
}

std::int64_t region_key(const Placement& p) {
  constexpr std::int64_t kBias = 1 << 12;
  return (((((std::int64_t{p.type_id} << 13) | (p.cell.x() + kBias)) << 13 | (p.cell.y() + kBias)) << 13 |
           (p.cell.z() + kBias))
          << 2) |
         (p.quarter_turns & 3);
}

namespace {

struct Candidate {
  DwellKey key;
  FootprintBox3D box;
  const PlacementRegion* region = nullptr;
};

std::vector<Candidate> idle_candidates(const TwinState& twin, const std::optional<PlanStep>& active) {
  std::vector<Candidate> out;
  for (const auto& t : twin.tracks) {
    out.push_back({{DwellKey::Track, t.track_id}, t.box, nullptr});
  }
  if (active && active->action == StepAction::Remove) {
    out.push_back({{DwellKey::Structure, active->instance_id}, active->place_region, nullptr});
  }
  return out;
}

std::vector<Candidate> holding_candidates(const MonitorState& s, const TwinState& twin,
                                          std::span<const PlacementRegion> regions) {
  std::vector<Candidate> out;
  for (const auto& r : regions) {
    out.push_back({{DwellKey::Region, region_key(r.placement)}, r.box, &r});
  }
  if (const Track* t = twin.find(s.held_track)) {
    out.push_back({{DwellKey::Track, t->track_id}, t->box, nullptr});
  } else {
    // The held part's track was lost or re-spawned; any part of its type can
    // take the release.
    for (const auto& t : twin.tracks) {
      if (t.class_id == s.held_type) {
        out.push_back({{DwellKey::Track, t.track_id}, t.box, nullptr});
      }
    }
  }
  return out;
}

void latch_containing(MonitorState& s, const std::vector<Candidate>& candidates, const Vec3& p) {
  s.dwell.clear();
  s.latched.clear();
  for (const auto& c : candidates) {
    if (point_in_box(p, c.box)) {
      s.latched.insert(c.key);
    }
  }
}

} // namespace

Observation observe_hand(const MonitorState& state, const HandSample& sample, const TwinState& twin,
                         const std::optional<PlanStep>& active,
                         std::span<const PlacementRegion> regions, const MonitorConfig& config) {
  Observation obs{state, {}};
  MonitorState& s = obs.state;
  if (sample.frame <= s.last_frame) {
    return obs;
  }
  s.last_frame = sample.frame;
  const Vec3& hand = sample.position;
  const int step_index = active ? active->step_index : -1;

  if (s.phase == Phase::Placed) {
    s.phase = Phase::Idle;
    latch_containing(s, idle_candidates(twin, active), hand);
    return obs;
  }

  const auto candidates = s.phase == Phase::Idle ? idle_candidates(twin, active)
                                                 : holding_candidates(s, twin, regions);

  std::map<DwellKey, int> dwell;
  std::set<DwellKey> latched;
  std::vector<const Candidate*> fired;
  for (const auto& c : candidates) {
    if (!point_in_box(hand, c.box)) {
      continue;
    }
    if (s.latched.count(c.key)) {
      latched.insert(c.key);
      continue;
    }
    const auto it = s.dwell.find(c.key);
    const int count = (it == s.dwell.end() ? 0 : it->second) + 1;
    dwell[c.key] = count;
    if (count == config.dwell_frames) {
      fired.push_back(&c);
    }
  }
  s.dwell = std::move(dwell);
  s.latched = std::move(latched);

  if (fired.empty()) {
    return obs;
  }

  // Target region first, then the box whose centre is nearest the hand.
  const Candidate* chosen = *std::min_element(fired.begin(), fired.end(), [&](const Candidate* a,
                                                                              const Candidate* b) {
    const bool ta = a->region != nullptr && a->region->is_target;
    const bool tb = b->region != nullptr && b->region->is_target;
    if (ta != tb) {
      return ta;
    }
    const double da = (a->box.center - hand).norm();
    const double db = (b->box.center - hand).norm();
    if (da != db) {
      return da < db;
    }
    return a->key < b->key;
  });

  InteractionEvent ev;
  ev.frame = sample.frame;
  ev.step_index = step_index;
  ev.marker_position = chosen->box.center;

  if (s.phase == Phase::Idle) {
    if (!active) {
      return obs; // nothing to validate against
    }
    if (chosen->key.kind == DwellKey::Structure) {
      ev.kind = EventKind::PickCorrect;
      ev.placement = active->placement;
      ev.marker = Marker::Checkmark;
      s.phase = Phase::Placed;
      obs.events.push_back(ev);
      latch_containing(s, candidates, hand);
      return obs;
    }
    const int track_id = static_cast<int>(chosen->key.id);
    const Track* track = twin.find(track_id);
    const bool correct = active->pick_track_id && *active->pick_track_id == track_id;
    ev.track_id = track_id;
    if (correct) {
      ev.kind = EventKind::PickCorrect;
      ev.marker = Marker::Checkmark;
      obs.events.push_back(ev);
    } else {
      ev.kind = EventKind::PickWrong;
      ev.marker = Marker::Cross;
      if (config.error_feedback) {
        obs.events.push_back(ev);
      }
    }
    if (correct || config.allow_deviant_pick) {
      s.phase = Phase::Holding;
      s.held_track = track_id;
      s.held_type = track ? track->class_id : -1;
      latch_containing(s, holding_candidates(s, twin, regions), hand);
    } else {
      latch_containing(s, candidates, hand);
    }
    return obs;
  }

  // Holding.
  if (chosen->region != nullptr) {
    ev.kind = chosen->region->is_target ? EventKind::PlaceCorrect : EventKind::PlaceDeviation;
    ev.placement = chosen->region->placement;
    ev.track_id = s.held_track;
    ev.marker = chosen->region->is_target ? Marker::Checkmark : Marker::None;
    s.phase = Phase::Placed;
  } else {
    ev.kind = EventKind::Release;
    ev.track_id = s.held_track;
    s.phase = Phase::Idle;
  }
  s.held_track = -1;
  s.held_type = -1;
  obs.events.push_back(ev);
  latch_containing(s, candidates, hand);
  return obs;
}

std::vector<PlacementRegion> placement_regions(const AssemblyState& state, const Catalog& catalog,
                                               const std::optional<PlanStep>& active, int held_type,
                                               const LatticeFrame& frame,
                                               const LatticeBounds& bounds,
                                               const PlacementRules& rules, double margin) {
  std::vector<PlacementRegion> out;
  std::optional<Placement> target;
  if (active && active->action == StepAction::Place && active->type_id == held_type) {
    target = active->placement;
    out.push_back({active->placement, frame.box(active->placement, catalog).inflated(margin), true});
  }
  if (held_type < 0 || !catalog.has_type(held_type)) {
    return out;
  }
  for (const auto& p : legal_placements(state, catalog, held_type, bounds, rules)) {
    if (target && target->type_id == p.type_id && target->cell == p.cell &&
        canonical_quarter_turns(*target, catalog) == canonical_quarter_turns(p, catalog)) {
      continue;
    }
    out.push_back({p, frame.box(p, catalog).inflated(margin), false});
  }
  return out;
}

nlohmann::json to_json(const InteractionEvent& e) {
  nlohmann::json j{{"kind", to_string(e.kind)},
                   {"frame", e.frame},
                   {"step_index", e.step_index},
                   {"marker", e.marker == Marker::Checkmark ? "check"
                              : e.marker == Marker::Cross   ? "cross"
                                                            : "none"},
                   {"marker_position", to_json(e.marker_position)}};
  j["track_id"] = e.track_id ? nlohmann::json(*e.track_id) : nlohmann::json(nullptr);
  j["placement"] = e.placement ? to_json(*e.placement) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const MonitorState& s) {
  nlohmann::json dwell = nlohmann::json::array();
  for (const auto& [k, v] : s.dwell) {
    dwell.push_back({k.kind, k.id, v});
  }
  nlohmann::json latched = nlohmann::json::array();
  for (const auto& k : s.latched) {
    latched.push_back({k.kind, k.id});
  }
  return {{"phase", to_string(s.phase)}, {"held_type", s.held_type}, {"held_track", s.held_track},
          {"dwell", dwell},               {"latched", latched},       {"last_frame", s.last_frame}};
}

} // namespace ae
