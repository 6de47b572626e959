#include "assembly_engine/sim.hpp"

#include <algorithm>
#include <cmath>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/rng.hpp"

namespace ae {

void NoiseParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(miss_prob) || !prob(class_confusion_prob)) {
    fail(ErrorCode::ScenarioInvalid, "noise probabilities must lie in [0, 1]");
  }
  if (!(jitter_sigma >= 0.0)) {
    fail(ErrorCode::ScenarioInvalid, "jitter_sigma must be non-negative");
  }
  if (!(confidence_a > 0.0) || !(confidence_b > 0.0)) {
    fail(ErrorCode::ScenarioInvalid, "confidence_beta shapes must be positive");
  }
  if (!(fps > 0.0)) {
    fail(ErrorCode::ScenarioInvalid, "fps must be positive");
  }
}

PlacementRules Scenario::rules() const {
  return PlacementRules{flags.ground_anchoring.value_or(mode == PlanMode::Layer)};
}

TwinConfig Scenario::twin_config() const {
  TwinConfig cfg = TwinConfig::from_catalog(catalog, plane);
  cfg.conf_min = twin.conf_min.value_or(cfg.conf_min);
  cfg.alpha = twin.alpha.value_or(cfg.alpha);
  cfg.expiry_frames = twin.expiry_frames.value_or(cfg.expiry_frames);
  if (twin.gate_radius) {
    for (auto& [id, gate] : cfg.gate_radius) {
      gate = *twin.gate_radius;
    }
  }
  return cfg;
}

int Scenario::last_frame() const { return camera.empty() ? -1 : camera.back().frame; }

CameraPose camera_at(const Scenario& scenario, double frame) {
  const auto& keys = scenario.camera;
  if (keys.empty() || frame < keys.front().frame || frame > keys.back().frame) {
    fail(ErrorCode::FrameOutOfRange, std::to_string(frame));
  }
  const auto upper = std::upper_bound(keys.begin(), keys.end(), frame,
                                      [](double f, const CameraKeyframe& k) { return f < k.frame; });
  if (upper == keys.end()) {
    return keys.back().pose;
  }
  const auto& b = *upper;
  const auto& a = *(upper - 1);
  if (a.pose.position == b.pose.position && a.pose.orientation.coeffs() == b.pose.orientation.coeffs() &&
      a.pose.hfov == b.pose.hfov) {
    return a.pose; // a held pose stays bit-identical however long the hold
  }
  const double t = (frame - a.frame) / static_cast<double>(b.frame - a.frame);
  CameraPose pose = a.pose;
  pose.position = (1.0 - t) * a.pose.position + t * b.pose.position;
  pose.orientation = a.pose.orientation.slerp(t, b.pose.orientation).normalized();
  pose.hfov = (1.0 - t) * a.pose.hfov + t * b.pose.hfov;
  return pose;
}

std::optional<BBox2D> render_bbox(const CameraPose& camera, const FootprintBox3D& box,
                                  const WorkPlane& plane) {
  const Vec3 n = plane.normal.normalized();
  const Vec3 base = box.center - n * box.half_extents.z();
  const auto centre = project_point(camera, base);
  if (!centre) {
    return std::nullopt;
  }
  const Eigen::AngleAxisd yaw(box.yaw, Vec3::UnitZ());
  Vec2 half = Vec2::Zero();
  for (int i = 0; i < 8; ++i) {
    const Vec3 local((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    const Vec3 corner = box.center + yaw * local.cwiseProduct(box.half_extents);
    const auto px = project_point(camera, corner);
    if (!px) {
      return std::nullopt;
    }
    half = half.cwiseMax((*px - *centre).cwiseAbs());
  }
  return BBox2D{*centre - half, *centre + half};
}

std::pair<CameraPose, std::vector<Detection>> render_detections(const Scenario& scenario, int frame,
                                                                const std::set<int>& hidden) {
  const CameraPose camera = camera_at(scenario, frame);
  const auto& types = scenario.catalog.types();
  const auto& noise = scenario.noise;
  std::vector<Detection> out;
  for (std::size_t i = 0; i < scenario.layout.size(); ++i) {
    if (hidden.count(static_cast<int>(i))) {
      continue;
    }
    const auto& part = scenario.layout[i];
    CounterRng rng(scenario.seed, streams::kDetections, static_cast<std::uint64_t>(frame), i);
    // Every draw happens unconditionally so the stream layout never depends on
    // the noise settings.
    const double miss = rng.uniform();
    const double j0 = rng.normal();
    const double j1 = rng.normal();
    const double j2 = rng.normal();
    const double j3 = rng.normal();
    const double flip = rng.uniform();
    const std::uint64_t other = types.size() > 1 ? rng.below(types.size() - 1) : 0;
    const double confidence = rng.beta(noise.confidence_a, noise.confidence_b);

    if (miss < noise.miss_prob) {
      continue;
    }
    const auto bbox = render_bbox(camera, part.box, scenario.plane);
    if (!bbox) {
      continue;
    }
    BBox2D b = *bbox;
    b.min += noise.jitter_sigma * Vec2(j0, j1);
    b.max += noise.jitter_sigma * Vec2(j2, j3);
    for (int k = 0; k < 2; ++k) {
      if (b.min[k] > b.max[k]) {
        std::swap(b.min[k], b.max[k]);
      }
    }
    if (b.max.x() < 0.0 || b.max.y() < 0.0 || b.min.x() > camera.width ||
        b.min.y() > camera.height) {
      continue;
    }

    int class_id = part.type_id;
    if (flip < noise.class_confusion_prob && types.size() > 1) {
      std::vector<int> others;
      for (const auto& t : types) {
        if (t.type_id != part.type_id) {
          others.push_back(t.type_id);
        }
      }
      class_id = others[other];
    }
    out.push_back(Detection{frame, class_id, b, confidence});
  }
  return {camera, std::move(out)};
}

HandKeyframe interpolate_hand(const std::vector<HandKeyframe>& keys, double frame) {
  if (keys.empty()) {
    fail(ErrorCode::NoScript);
  }
  if (frame <= keys.front().frame) {
    return keys.front();
  }
  const auto upper = std::upper_bound(keys.begin(), keys.end(), frame,
                                      [](double f, const HandKeyframe& k) { return f < k.frame; });
  if (upper == keys.end()) {
    return keys.back();
  }
  const auto& b = *upper;
  const auto& a = *(upper - 1);
  HandKeyframe out = a;
  const double t = (frame - a.frame) / static_cast<double>(b.frame - a.frame);
  out.position = (1.0 - t) * a.position + t * b.position;
  return out;
}

std::optional<HandSample> scripted_hand(const Scenario& scenario, int frame) {
  if (!scenario.hand_script || scenario.hand_script->empty()) {
    fail(ErrorCode::NoScript);
  }
  const auto& keys = *scenario.hand_script;
  if (frame < keys.front().frame) {
    return std::nullopt;
  }
  const auto k = interpolate_hand(keys, frame);
  return HandSample{frame, k.position, k.hand};
}

Plan initial_plan(const Scenario& scenario) {
  if (scenario.mode == PlanMode::Layer) {
    return sequence_layered(scenario.model, scenario.catalog, scenario.lattice);
  }
  const auto base = scenario.base ? scenario.base : default_base(scenario.model);
  if (!base) {
    fail(ErrorCode::EmptyModel);
  }
  return sequence_graph(scenario.model, *base, scenario.catalog, scenario.lattice);
}

} // namespace ae
