#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/assembly.hpp"
#include "assembly_engine/planner.hpp"
#include "assembly_engine/twin.hpp"

namespace ae {

enum class HandSide { Left, Right };

struct HandSample {
  int frame = 0;
  Vec3 position = Vec3::Zero(); // palm centroid, metres
  HandSide hand = HandSide::Right;
};

enum class EventKind { PickCorrect, PickWrong, PlaceCorrect, PlaceDeviation, Release };
enum class Marker { None, Checkmark, Cross };

std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);
std::string to_string(HandSide h);
HandSide hand_side_from_string(const std::string& s);

struct InteractionEvent {
  EventKind kind = EventKind::PickCorrect;
  int frame = 0;
  std::optional<int> track_id;
  std::optional<Placement> placement;
  int step_index = -1;
  Marker marker = Marker::None;
  Vec3 marker_position = Vec3::Zero();

  bool operator==(const InteractionEvent&) const = default;
};

enum class Phase { Idle, Holding, Placed };
std::string to_string(Phase p);

/// Identifies one candidate box across frames.
struct DwellKey {
  enum Kind : int { Track = 0, Region = 1, Structure = 2 };
  int kind = Track;
  std::int64_t id = 0;

  auto operator<=>(const DwellKey&) const = default;
};

struct MonitorState {
  Phase phase = Phase::Idle;
  int held_type = -1;
  int held_track = -1;
  std::map<DwellKey, int> dwell;
  std::set<DwellKey> latched; // boxes the hand must leave before they count again
  int last_frame = -1;

  bool operator==(const MonitorState&) const = default;
};

struct MonitorConfig {
  int dwell_frames = 5;
  double region_margin = 0.01;
  bool allow_deviant_pick = true;
  bool error_feedback = true; // false suppresses pick_wrong feedback
};

struct PlacementRegion {
  Placement placement;
  FootprintBox3D box; // already inflated by the region margin
  bool is_target = false;
};

struct Observation {
  MonitorState state;
  std::vector<InteractionEvent> events;
};

/// Advances the hand-interaction state machine by one sample.
///
/// Idle: dwelling `dwell_frames` in a track box emits pick_correct for the
/// active step's bound track (checkmark at the box centre) and pick_wrong for
/// any other (cross). A removal step's structure box counts as the bound pick.
/// Holding: dwelling in a placement region emits place_correct for the target
/// region and place_deviation otherwise; dwelling again in the held part's own
/// box emits release (any box of the held type once that track is gone).
/// Placed lasts one sample and returns to idle.
/// Samples that do not advance the frame are ignored.
Observation observe_hand(const MonitorState& state, const HandSample& sample, const TwinState& twin,
                         const std::optional<PlanStep>& active,
                         std::span<const PlacementRegion> regions, const MonitorConfig& config);

/// Target region (when the held type matches the active step) followed by every
/// other legal placement of the held type, each inflated by `margin`.
std::vector<PlacementRegion> placement_regions(const AssemblyState& state, const Catalog& catalog,
                                               const std::optional<PlanStep>& active, int held_type,
                                               const LatticeFrame& frame,
                                               const LatticeBounds& bounds,
                                               const PlacementRules& rules, double margin);

/// Stable key for a placement region.
std::int64_t region_key(const Placement& p);

nlohmann::json to_json(const InteractionEvent& e);
nlohmann::json to_json(const MonitorState& s);

} // namespace ae
