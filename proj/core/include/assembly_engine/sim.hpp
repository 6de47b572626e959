#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "assembly_engine/assembly.hpp"
#include "assembly_engine/monitor.hpp"
#include "assembly_engine/planner.hpp"
#include "assembly_engine/replanner.hpp"
#include "assembly_engine/twin.hpp"

namespace ae {

inline constexpr int kScenarioSchemaVersion = 1;

struct NoiseParams {
  double miss_prob = 0.0;
  double jitter_sigma = 0.0; // px, applied to each bbox edge
  double class_confusion_prob = 0.0;
  double confidence_a = 8.0; // beta shape parameters
  double confidence_b = 2.0;
  double fps = 30.0;

  /// Throws Error(ScenarioInvalid).
  void validate() const;
};

struct LoosePart {
  int type_id = 0;
  FootprintBox3D box;
};

struct CameraKeyframe {
  int frame = 0;
  CameraPose pose;
};

struct HandKeyframe {
  int frame = 0;
  Vec3 position = Vec3::Zero();
  HandSide hand = HandSide::Right;
  /// Expected monitor event for the dwell starting here ("pick_correct",
  /// "pick_wrong", "place_correct", "place_deviation", "release"), or empty.
  std::string intent;
};

/// Per-scenario overrides of the twin defaults.
struct TwinOverrides {
  std::optional<double> conf_min;
  std::optional<double> alpha;
  std::optional<int> expiry_frames;
  std::optional<double> gate_radius; // metres, every class
};

struct ScenarioFlags {
  bool error_feedback = true;
  bool rigid_joints = false;
  std::optional<bool> ground_anchoring; // defaults to on in layer mode
  bool allow_deviant_pick = true;
  int auto_select = 0; // candidate chosen by headless runs
  int dwell_frames = 5;
  double region_margin = 0.01;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::string catalog_ref; // as written in the document
  std::string model_ref;
  Catalog catalog;
  AssemblyState model; // target structure, edges filled in
  Inventory inventory; // loose parts available to the session
  std::vector<LoosePart> layout;
  std::vector<CameraKeyframe> camera; // first keyframe at frame 0, frames increasing
  NoiseParams noise;
  GoalSet goals;
  std::optional<std::vector<HandKeyframe>> hand_script;
  PlanMode mode = PlanMode::Layer;
  std::optional<int> base; // graph mode base instance
  ScenarioFlags flags;
  TwinOverrides twin;
  LatticeFrame lattice;
  LatticeBounds bounds;
  WorkPlane plane;

  PlacementRules rules() const;
  TwinConfig twin_config() const;
  /// Last renderable frame; frames run from 0.
  int last_frame() const;
};

/// Camera at a (possibly fractional) frame: linear position, slerp orientation.
/// Errors: FrameOutOfRange.
CameraPose camera_at(const Scenario& scenario, double frame);

/// Image bbox of a box: centred on the projection of its base centre and wide
/// enough to cover all eight projected corners. Empty when any corner is
/// behind the camera.
std::optional<BBox2D> render_bbox(const CameraPose& camera, const FootprintBox3D& box,
                                  const WorkPlane& plane);

/// Noisy detections of every visible loose part. Parts listed in `hidden`
/// (indices into the layout) are not rendered. Each part draws from its own
/// (seed, frame, part) stream. Errors: FrameOutOfRange.
std::pair<CameraPose, std::vector<Detection>> render_detections(const Scenario& scenario, int frame,
                                                                const std::set<int>& hidden = {});

/// Piecewise-linear position between keyframes; the last keyframe is held and
/// frames before the first return the first.
HandKeyframe interpolate_hand(const std::vector<HandKeyframe>& keyframes, double frame);

/// Scripted hand sample at `frame`; empty before the first keyframe.
/// Errors: NoScript.
std::optional<HandSample> scripted_hand(const Scenario& scenario, int frame);

/// Target model, rules and plan for a scenario.
Plan initial_plan(const Scenario& scenario);

} // namespace ae
