#pragma once

#include <map>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/catalog.hpp"
#include "assembly_engine/geometry.hpp"

namespace ae {

struct Detection {
  int frame = 0;
  int class_id = 0;
  BBox2D bbox;
  double confidence = 1.0;
};

struct Track {
  int track_id = 0;
  int class_id = 0;
  FootprintBox3D box;
  int last_seen = 0;
  int hits = 1;
  Vec3 smoothed_center = Vec3::Zero();
};

struct TwinState {
  int frame = -1; // last ingested frame, -1 before the first
  int next_track_id = 0;
  std::vector<Track> tracks; // sorted by track_id

  const Track* find(int track_id) const;
};

/// Association and lifetime parameters. The gate radius defaults to half the
/// largest footprint dimension in the catalog, in metres, for every class;
/// merge radius is half the gate.
struct TwinConfig {
  WorkPlane plane;
  double conf_min = 0.25;
  double alpha = 0.4;
  int expiry_frames = 15;
  std::map<int, double> gate_radius;
  std::map<int, double> component_height;

  static TwinConfig from_catalog(const Catalog& catalog, const WorkPlane& plane = {});
  bool knows(int class_id) const { return gate_radius.count(class_id) > 0; }
  double gate(int class_id) const { return gate_radius.at(class_id); }
  double merge_radius(int class_id) const { return 0.5 * gate(class_id); }
};

/// One association decision: detection index -> track id.
struct Association {
  std::size_t detection;
  int track_id;
  double distance;
};

/// Greedy nearest-neighbour association per class within the gate. Pairs are
/// taken in order of (distance, track_id, detection index).
std::vector<Association> associate(const std::vector<Track>& tracks,
                                   const std::vector<FootprintBox3D>& boxes,
                                   std::span<const Detection> detections, const TwinConfig& config);

/// Projects the detections onto the work plane, associates them with live
/// tracks, spawns tracks for confident unmatched detections, smooths matched
/// centres, merges same-class tracks closer than the merge radius and drops
/// tracks unseen for `expiry_frames`.
/// Detections whose footprint cannot be projected are skipped.
/// Errors: NonMonotonicFrame, UnknownClass.
TwinState ingest_frame(const TwinState& state, const TwinConfig& config, int frame,
                       const CameraPose& camera, std::span<const Detection> detections);

/// Live tracks of one class sorted by track_id.
std::vector<Track> query_component(const TwinState& state, int class_id);

/// Drops a track, e.g. once its part has been built into the structure.
TwinState remove_track(const TwinState& state, int track_id);

nlohmann::json to_json(const Track& t);
nlohmann::json to_json(const TwinState& s);
nlohmann::json to_json(const FootprintBox3D& b);
nlohmann::json to_json(const Vec3& v);

} // namespace ae
