#include "assembly_engine/twin.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "assembly_engine/errors.hpp"

namespace ae {

const Track* TwinState::find(int track_id) const {
  const auto it = std::lower_bound(tracks.begin(), tracks.end(), track_id,
                                   [](const Track& t, int id) { return t.track_id < id; });
  return (it != tracks.end() && it->track_id == track_id) ? &*it : nullptr;
}

TwinConfig TwinConfig::from_catalog(const Catalog& catalog, const WorkPlane& plane) {
  TwinConfig cfg;
  cfg.plane = plane;
  const double gate = 0.5 * catalog.max_footprint_dim() * catalog.cell_size();
  for (const auto& t : catalog.types()) {
    cfg.gate_radius[t.type_id] = gate;
    cfg.component_height[t.type_id] = t.footprint.z() * catalog.cell_size();
  }
  return cfg;
}

std::vector<Association> associate(const std::vector<Track>& tracks,
                                   const std::vector<FootprintBox3D>& boxes,
                                   std::span<const Detection> detections, const TwinConfig& config) {
  struct Pair {
    double distance;
    int track_id;
    std::size_t detection;
  };
  std::vector<Pair> pairs;
  for (const auto& t : tracks) {
    for (std::size_t d = 0; d < detections.size(); ++d) {
      if (detections[d].class_id != t.class_id) {
        continue;
      }
      const double dist = (boxes[d].center - t.smoothed_center).norm();
      if (dist <= config.gate(t.class_id)) {
        pairs.push_back({dist, t.track_id, d});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.distance, a.track_id, a.detection) <
           std::tie(b.distance, b.track_id, b.detection);
  });

  std::vector<Association> out;
  std::vector<int> used_tracks;
  std::vector<bool> used_dets(detections.size(), false);
  for (const auto& p : pairs) {
    if (used_dets[p.detection] ||
        std::find(used_tracks.begin(), used_tracks.end(), p.track_id) != used_tracks.end()) {
      continue;
    }
    used_dets[p.detection] = true;
    used_tracks.push_back(p.track_id);
    out.push_back({p.detection, p.track_id, p.distance});
  }
  return out;
}

TwinState ingest_frame(const TwinState& state, const TwinConfig& config, int frame,
                       const CameraPose& camera, std::span<const Detection> detections) {
  if (frame <= state.frame) {
    fail(ErrorCode::NonMonotonicFrame,
         std::to_string(frame) + " after " + std::to_string(state.frame));
  }
  for (const auto& d : detections) {
    if (d.frame != frame) {
      throw std::invalid_argument("detection frame does not match the ingested frame");
    }
    if (!config.knows(d.class_id)) {
      fail(ErrorCode::UnknownClass, std::to_string(d.class_id));
    }
  }

  // Project; detections that cannot reach the plane are dropped here.
  std::vector<Detection> usable;
  std::vector<FootprintBox3D> boxes;
  usable.reserve(detections.size());
  boxes.reserve(detections.size());
  for (const auto& d : detections) {
    try {
      boxes.push_back(project_bbox(camera, d.bbox.clamped(camera.width, camera.height), config.plane,
                                   config.component_height.at(d.class_id)));
      usable.push_back(d);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateProjection) {
        throw;
      }
    }
  }

  TwinState next = state;
  next.frame = frame;

  const auto matches = associate(next.tracks, boxes, usable, config);
  std::vector<bool> matched(usable.size(), false);
  for (const auto& m : matches) {
    matched[m.detection] = true;
    auto it = std::find_if(next.tracks.begin(), next.tracks.end(),
                           [&](const Track& t) { return t.track_id == m.track_id; });
    Track& t = *it;
    t.smoothed_center = (1.0 - config.alpha) * t.smoothed_center + config.alpha * boxes[m.detection].center;
    t.box = boxes[m.detection];
    t.box.center = t.smoothed_center;
    t.last_seen = frame;
    t.hits += 1;
  }

  for (std::size_t d = 0; d < usable.size(); ++d) {
    if (matched[d] || usable[d].confidence < config.conf_min) {
      continue;
    }
    Track t;
    t.track_id = next.next_track_id++;
    t.class_id = usable[d].class_id;
    t.box = boxes[d];
    t.smoothed_center = boxes[d].center;
    t.last_seen = frame;
    t.hits = 1;
    next.tracks.push_back(t);
  }

  // Expire, then merge near-duplicates into the older track.
  std::vector<Track> kept;
  kept.reserve(next.tracks.size());
  for (const auto& t : next.tracks) {
    if (frame - t.last_seen >= config.expiry_frames) {
      continue;
    }
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Track& k) {
      return k.class_id == t.class_id &&
             (k.smoothed_center - t.smoothed_center).norm() < config.merge_radius(t.class_id);
    });
    if (!duplicate) {
      kept.push_back(t);
    }
  }
  next.tracks = std::move(kept);
  return next;
}

std::vector<Track> query_component(const TwinState& state, int class_id) {
  std::vector<Track> out;
  for (const auto& t : state.tracks) {
    if (t.class_id == class_id) {
      out.push_back(t);
    }
  }
  return out;
}

TwinState remove_track(const TwinState& state, int track_id) {
  TwinState next = state;
  std::erase_if(next.tracks, [&](const Track& t) { return t.track_id == track_id; });
  return next;
}

nlohmann::json to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

nlohmann::json to_json(const FootprintBox3D& b) {
  return {{"center", to_json(b.center)}, {"half_extents", to_json(b.half_extents)}, {"yaw", b.yaw}};
}

nlohmann::json to_json(const Track& t) {
  return {{"track_id", t.track_id},       {"class_id", t.class_id},
          {"box", to_json(t.box)},         {"last_seen", t.last_seen},
          {"hits", t.hits},                {"smoothed_center", to_json(t.smoothed_center)}};
}

nlohmann::json to_json(const TwinState& s) {
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : s.tracks) {
    tracks.push_back(to_json(t));
  }
  return {{"frame", s.frame}, {"next_track_id", s.next_track_id}, {"tracks", tracks}};
}

} // namespace ae
