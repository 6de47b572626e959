#include "assembly_engine/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include "assembly_engine/errors.hpp"

namespace ae {

using json = nlohmann::json;

namespace {

json load_ref(const json& value, const std::filesystem::path& base_dir, std::string& ref) {
  if (value.is_string()) {
    ref = value.get<std::string>();
    return read_json_file(base_dir / ref);
  }
  return value;
}

} // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedDocument, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << text;
  if (!out) {
    fail(ErrorCode::IoFailure, "short write to " + path.string());
  }
}

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorCode::MalformedDocument, "expected a 3-vector");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const CameraPose& pose) {
  const auto& q = pose.orientation;
  return {{"position", to_json(pose.position)},
          {"orientation", {q.w(), q.x(), q.y(), q.z()}},
          {"hfov", pose.hfov},
          {"width", pose.width},
          {"height", pose.height}};
}

CameraPose camera_from_json(const json& j) {
  const double hfov = j.contains("hfov_deg") ? deg_to_rad(j.at("hfov_deg").get<double>())
                                             : j.value("hfov", deg_to_rad(60.0));
  const int width = j.value("width", 640);
  const int height = j.value("height", 480);
  CameraPose pose;
  if (j.contains("orbit")) {
    const auto& o = j.at("orbit");
    pose = CameraPose::orbit(vec_from_json(j.value("target", json::array({0.0, 0.0, 0.0}))),
                             deg_to_rad(o.at("azimuth_deg").get<double>()),
                             deg_to_rad(o.at("elevation_deg").get<double>()),
                             o.at("distance").get<double>(), hfov, width, height);
  } else if (j.contains("target")) {
    pose = CameraPose::look_at(vec_from_json(j.at("position")), vec_from_json(j.at("target")), hfov,
                               width, height);
  } else {
    const auto& q = j.at("orientation");
    pose.position = vec_from_json(j.at("position"));
    pose.orientation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                          q.at(2).get<double>(), q.at(3).get<double>());
    pose.hfov = hfov;
    pose.width = width;
    pose.height = height;
  }
  try {
    pose.validate();
  } catch (const std::invalid_argument& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
  return pose;
}

json to_json(const HandKeyframe& k) {
  json j{{"frame", k.frame}, {"position", to_json(k.position)}, {"hand", to_string(k.hand)}};
  if (!k.intent.empty()) {
    j["intent"] = k.intent;
  }
  return j;
}

HandKeyframe hand_keyframe_from_json(const json& j) {
  HandKeyframe k;
  k.frame = j.at("frame").get<int>();
  k.position = vec_from_json(j.at("position"));
  k.hand = hand_side_from_string(j.value("hand", std::string("right")));
  k.intent = j.value("intent", std::string());
  if (!k.intent.empty()) {
    event_kind_from_string(k.intent);
  }
  return k;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    if (!doc.is_object()) {
      fail(ErrorCode::MalformedDocument, "scenario must be an object");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kScenarioSchemaVersion) {
      fail(ErrorCode::MalformedDocument, "unsupported schema_version " + std::to_string(version));
    }
    s.name = doc.value("name", std::string());
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.catalog = load_catalog(load_ref(doc.at("catalog"), base_dir, s.catalog_ref));

    const json model = load_ref(doc.at("model"), base_dir, s.model_ref);
    std::vector<Placement> placements;
    for (const auto& pj : model.at("placements")) {
      placements.push_back(placement_from_json(pj));
    }
    s.model = build_model(std::move(placements), s.catalog);

    if (doc.contains("mode")) {
      s.mode = plan_mode_from_string(doc.at("mode").get<std::string>());
    }
    if (doc.contains("base") && !doc.at("base").is_null()) {
      s.base = doc.at("base").get<int>();
    }

    if (doc.contains("lattice")) {
      const auto& l = doc.at("lattice");
      s.lattice.origin = vec_from_json(l.value("origin", json::array({0.0, 0.0, 0.0})));
      s.lattice.cell_size = l.value("cell_size", s.catalog.cell_size());
    } else {
      s.lattice.cell_size = s.catalog.cell_size();
    }
    if (doc.contains("bounds")) {
      const auto& b = doc.at("bounds");
      const auto lo = b.at("min").get<std::vector<int>>();
      const auto hi = b.at("max").get<std::vector<int>>();
      if (lo.size() != 3 || hi.size() != 3) {
        fail(ErrorCode::MalformedDocument, "bounds need 3 components");
      }
      s.bounds.min = {lo[0], lo[1], lo[2]};
      s.bounds.max = {hi[0], hi[1], hi[2]};
    }
    if (doc.contains("plane")) {
      s.plane.origin = vec_from_json(doc.at("plane").at("origin"));
      s.plane.normal = vec_from_json(doc.at("plane").at("normal"));
    }
    try {
      s.plane.validate();
    } catch (const std::invalid_argument& e) {
      fail(ErrorCode::MalformedDocument, e.what());
    }

    for (const auto& pj : doc.value("layout", json::array())) {
      LoosePart part;
      part.type_id = pj.at("type_id").get<int>();
      const auto& type = s.catalog.type(part.type_id);
      const double yaw = pj.contains("yaw") ? pj.at("yaw").get<double>()
                                            : deg_to_rad(pj.value("yaw_deg", 0.0));
      Vec3 half = 0.5 * type.footprint.cast<double>() * s.lattice.cell_size;
      if (pj.contains("half_extents")) {
        half = vec_from_json(pj.at("half_extents"));
      }
      Vec3 center;
      if (pj.contains("center")) {
        center = vec_from_json(pj.at("center"));
      } else {
        const auto xy = pj.at("position").get<std::vector<double>>();
        if (xy.size() != 2) {
          fail(ErrorCode::MalformedDocument, "layout position needs 2 components");
        }
        center = s.plane.from_plane(Vec2(xy[0], xy[1])) + s.plane.normal.normalized() * half.z();
      }
      part.box = FootprintBox3D{center, half, yaw};
      s.layout.push_back(part);
    }

    if (doc.contains("inventory")) {
      for (const auto& [k, v] : doc.at("inventory").items()) {
        const int id = std::stoi(k);
        s.catalog.type(id);
        const int n = v.get<int>();
        if (n < 0) {
          fail(ErrorCode::MalformedDocument, "negative inventory for type " + k);
        }
        s.inventory.counts[id] = n;
      }
    } else {
      for (const auto& t : s.catalog.types()) {
        s.inventory.counts[t.type_id] = 0;
      }
      for (const auto& part : s.layout) {
        s.inventory.counts[part.type_id] += 1;
      }
    }

    for (const auto& cj : doc.at("camera")) {
      s.camera.push_back({cj.at("frame").get<int>(), camera_from_json(cj)});
    }
    if (s.camera.empty() || s.camera.front().frame != 0) {
      fail(ErrorCode::MalformedDocument, "camera trajectory must start at frame 0");
    }
    for (std::size_t i = 1; i < s.camera.size(); ++i) {
      if (s.camera[i].frame <= s.camera[i - 1].frame) {
        fail(ErrorCode::MalformedDocument, "camera keyframes must have increasing frames");
      }
    }

    if (doc.contains("noise")) {
      const auto& n = doc.at("noise");
      s.noise.miss_prob = n.value("miss_prob", 0.0);
      s.noise.jitter_sigma = n.value("jitter_sigma", 0.0);
      s.noise.class_confusion_prob = n.value("class_confusion_prob", 0.0);
      if (n.contains("confidence_beta")) {
        s.noise.confidence_a = n.at("confidence_beta").at(0).get<double>();
        s.noise.confidence_b = n.at("confidence_beta").at(1).get<double>();
      }
      s.noise.fps = n.value("fps", 30.0);
    }
    s.noise.validate();

    if (doc.contains("goals")) {
      s.goals = goals_from_json(doc.at("goals"));
    } else {
      s.goals.target_height = std::max(1, structure_height(s.model, s.catalog));
      s.goals.max_components = std::max<int>(1, static_cast<int>(s.model.placements.size()));
    }

    if (doc.contains("hand_script") && !doc.at("hand_script").is_null()) {
      std::vector<HandKeyframe> keys;
      for (const auto& kj : doc.at("hand_script")) {
        keys.push_back(hand_keyframe_from_json(kj));
      }
      for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i].frame <= keys[i - 1].frame) {
          fail(ErrorCode::MalformedDocument, "hand keyframes must have increasing frames");
        }
      }
      s.hand_script = std::move(keys);
    }

    if (doc.contains("flags")) {
      const auto& f = doc.at("flags");
      s.flags.error_feedback = f.value("error_feedback", true);
      s.flags.rigid_joints = f.value("rigid_joints", false);
      if (f.contains("ground_anchoring")) {
        s.flags.ground_anchoring = f.at("ground_anchoring").get<bool>();
      }
      s.flags.allow_deviant_pick = f.value("allow_deviant_pick", true);
      s.flags.auto_select = f.value("auto_select", 0);
      s.flags.dwell_frames = f.value("dwell_frames", 5);
      s.flags.region_margin = f.value("region_margin", 0.01);
      if (s.flags.dwell_frames < 1 || s.flags.auto_select < 0 || s.flags.region_margin < 0.0) {
        fail(ErrorCode::MalformedDocument, "flags out of range");
      }
    }

    if (doc.contains("twin")) {
      const auto& t = doc.at("twin");
      auto opt = [&](const char* key, auto& field) {
        if (t.contains(key) && !t.at(key).is_null()) {
          field = t.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
        }
      };
      opt("conf_min", s.twin.conf_min);
      opt("alpha", s.twin.alpha);
      opt("expiry_frames", s.twin.expiry_frames);
      opt("gate_radius", s.twin.gate_radius);
      if (s.twin.conf_min.value_or(0.0) < 0.0 || s.twin.conf_min.value_or(0.0) > 1.0 ||
          s.twin.alpha.value_or(0.5) <= 0.0 || s.twin.alpha.value_or(0.5) > 1.0 ||
          s.twin.expiry_frames.value_or(1) < 1 || s.twin.gate_radius.value_or(1.0) <= 0.0) {
        fail(ErrorCode::MalformedDocument, "twin parameters out of range");
      }
    }

    // The target must be sequenceable under the scenario's mode.
    initial_plan(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ScenarioInvalid) {
      throw;
    }
    fail(ErrorCode::ScenarioInvalid, e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::ScenarioInvalid, e.what());
  } catch (const std::exception& e) {
    fail(ErrorCode::ScenarioInvalid, e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::ScenarioInvalid, e.what());
  }
  return scenario_from_json(doc, path.parent_path());
}

json scenario_to_json(const Scenario& s) {
  json placements = json::array();
  for (const auto& p : s.model.placements) {
    placements.push_back(to_json(p));
  }
  json layout = json::array();
  for (const auto& part : s.layout) {
    layout.push_back({{"type_id", part.type_id},
                      {"center", to_json(part.box.center)},
                      {"half_extents", to_json(part.box.half_extents)},
                      {"yaw", part.box.yaw}});
  }
  json camera = json::array();
  for (const auto& k : s.camera) {
    json cj = to_json(k.pose);
    cj["frame"] = k.frame;
    camera.push_back(cj);
  }
  json inventory = json::object();
  for (const auto& [id, n] : s.inventory.counts) {
    inventory[std::to_string(id)] = n;
  }
  json flags{{"error_feedback", s.flags.error_feedback},
             {"rigid_joints", s.flags.rigid_joints},
             {"allow_deviant_pick", s.flags.allow_deviant_pick},
             {"auto_select", s.flags.auto_select},
             {"dwell_frames", s.flags.dwell_frames},
             {"region_margin", s.flags.region_margin}};
  if (s.flags.ground_anchoring) {
    flags["ground_anchoring"] = *s.flags.ground_anchoring;
  }
  json doc{{"schema_version", kScenarioSchemaVersion},
           {"name", s.name},
           {"seed", s.seed},
           {"catalog", s.catalog.to_json()},
           {"model", {{"placements", placements}}},
           {"mode", to_string(s.mode)},
           {"lattice", {{"origin", to_json(s.lattice.origin)}, {"cell_size", s.lattice.cell_size}}},
           {"bounds",
            {{"min", {s.bounds.min.x(), s.bounds.min.y(), s.bounds.min.z()}},
             {"max", {s.bounds.max.x(), s.bounds.max.y(), s.bounds.max.z()}}}},
           {"plane", {{"origin", to_json(s.plane.origin)}, {"normal", to_json(s.plane.normal)}}},
           {"layout", layout},
           {"inventory", inventory},
           {"camera", camera},
           {"noise",
            {{"miss_prob", s.noise.miss_prob},
             {"jitter_sigma", s.noise.jitter_sigma},
             {"class_confusion_prob", s.noise.class_confusion_prob},
             {"confidence_beta", {s.noise.confidence_a, s.noise.confidence_b}},
             {"fps", s.noise.fps}}},
           {"goals", to_json(s.goals)},
           {"flags", flags}};
  doc["base"] = s.base ? json(*s.base) : json(nullptr);
  json twin = json::object();
  if (s.twin.conf_min) twin["conf_min"] = *s.twin.conf_min;
  if (s.twin.alpha) twin["alpha"] = *s.twin.alpha;
  if (s.twin.expiry_frames) twin["expiry_frames"] = *s.twin.expiry_frames;
  if (s.twin.gate_radius) twin["gate_radius"] = *s.twin.gate_radius;
  if (!twin.empty()) {
    doc["twin"] = twin;
  }
  if (s.hand_script) {
    json keys = json::array();
    for (const auto& k : *s.hand_script) {
      keys.push_back(to_json(k));
    }
    doc["hand_script"] = keys;
  } else {
    doc["hand_script"] = nullptr;
  }
  return doc;
}

void save_scenario_file(const Scenario& scenario, const std::filesystem::path& path) {
  write_text_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

AssemblyState initial_assembly(const Scenario& scenario) {
  AssemblyState s;
  s.inventory = scenario.inventory;
  return s;
}

} // namespace ae
