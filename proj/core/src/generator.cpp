#include "assembly_engine/generator.hpp"

#include <algorithm>
#include <cmath>
#include <array>

#include "assembly_engine/scenario_io.hpp"

namespace ae {

using json = nlohmann::json;

namespace {

json port(double x, double y, double z, const char* dir, const char* cls) {
  return {{"local_offset", {x, y, z}}, {"direction", dir}, {"compatibility_class", cls}};
}

json brick(int id, int dx, int dy, const char* color) {
  json ports = json::array();
  for (int i = 0; i < dx; ++i) {
    for (int j = 0; j < dy; ++j) {
      ports.push_back(port(i + 0.5, j + 0.5, 1.0, "+z", "stud"));
      ports.push_back(port(i + 0.5, j + 0.5, 0.0, "-z", "socket"));
    }
  }
  return {{"type_id", id},
          {"name", "brick_" + std::to_string(dx) + "x" + std::to_string(dy)},
          {"footprint", {dx, dy, 1}},
          {"mass", 0.0012 * dx * dy},
          {"color_tag", color},
          {"ports", ports}};
}

json part(int id, const char* name, std::array<int, 3> fp, double mass, const char* color,
          json ports) {
  return {{"type_id", id},     {"name", name},      {"footprint", fp},
          {"mass", mass},      {"color_tag", color}, {"ports", std::move(ports)}};
}

// Layer-by-layer building needs every raised part joined to one beneath it.
bool rests_on_lower(const AssemblyState& state, const Placement& p, const Catalog& catalog) {
  Placement probe = p;
  probe.instance_id = state.next_instance_id();
  for (const auto& e : induced_edges(state, probe, catalog)) {
    const int other = e.instance_a == probe.instance_id ? e.instance_b : e.instance_a;
    if (const Placement* q = state.find(other); q && q->cell.z() < p.cell.z()) {
      return true;
    }
  }
  return false;
}

} // namespace

json brick_catalog_document() {
  json types = json::array({brick(1, 1, 1, "red"), brick(2, 1, 2, "orange"),
                            brick(3, 1, 3, "yellow"), brick(4, 1, 4, "green"),
                            brick(5, 1, 6, "teal"), brick(6, 2, 2, "blue"),
                            brick(7, 2, 3, "purple"), brick(8, 2, 4, "gray")});
  return {{"schema_version", kCatalogSchemaVersion},
          {"name", "bricks"},
          {"cell_size", 0.04},
          {"types", types},
          {"rules", json::array({{{"class_a", "stud"}, {"class_b", "socket"}, {"allowed", true}},
                                 {{"class_a", "socket"}, {"class_b", "stud"}, {"allowed", true}},
                                 {{"class_a", "stud"}, {"class_b", "stud"}, {"allowed", false}},
                                 {{"class_a", "socket"}, {"class_b", "socket"}, {"allowed", false}}})}};
}

json nodal_catalog_document() {
  const char* S = "socket";
  const char* P = "peg";
  json types = json::array();
  types.push_back(part(1, "hub_6", {1, 1, 1}, 0.030, "white",
                       {port(1, .5, .5, "+x", S), port(0, .5, .5, "-x", S),
                        port(.5, 1, .5, "+y", S), port(.5, 0, .5, "-y", S),
                        port(.5, .5, 1, "+z", S), port(.5, .5, 0, "-z", S)}));
  types.push_back(part(2, "hub_4_flat", {1, 1, 1}, 0.024, "white",
                       {port(1, .5, .5, "+x", S), port(0, .5, .5, "-x", S),
                        port(.5, 1, .5, "+y", S), port(.5, 0, .5, "-y", S)}));
  types.push_back(part(3, "hub_corner", {1, 1, 1}, 0.020, "white",
                       {port(1, .5, .5, "+x", S), port(.5, 1, .5, "+y", S),
                        port(.5, .5, 1, "+z", S), port(.5, .5, 0, "-z", S)}));
  types.push_back(part(4, "hub_elbow", {1, 1, 1}, 0.016, "white",
                       {port(1, .5, .5, "+x", S), port(.5, .5, 1, "+z", S),
                        port(.5, .5, 0, "-z", S)}));
  types.push_back(part(5, "hub_tee", {1, 1, 1}, 0.018, "white",
                       {port(1, .5, .5, "+x", S), port(0, .5, .5, "-x", S),
                        port(.5, .5, 1, "+z", S)}));
  types.push_back(part(6, "strut_x2", {2, 1, 1}, 0.012, "black",
                       {port(0, .5, .5, "-x", P), port(2, .5, .5, "+x", P)}));
  types.push_back(part(7, "strut_x3", {3, 1, 1}, 0.018, "black",
                       {port(0, .5, .5, "-x", P), port(3, .5, .5, "+x", P)}));
  types.push_back(part(8, "strut_z2", {1, 1, 2}, 0.012, "black",
                       {port(.5, .5, 0, "-z", P), port(.5, .5, 2, "+z", P)}));
  types.push_back(part(9, "strut_z3", {1, 1, 3}, 0.018, "black",
                       {port(.5, .5, 0, "-z", P), port(.5, .5, 3, "+z", P)}));
  types.push_back(part(10, "foot_3x3", {3, 3, 1}, 0.060, "orange",
                       {port(1.5, 1.5, 1, "+z", P)}));
  types.push_back(part(11, "peg_tee", {3, 1, 1}, 0.020, "blue",
                       {port(0, .5, .5, "-x", P), port(3, .5, .5, "+x", P),
                        port(1.5, .5, 1, "+z", S)}));
  types.push_back(part(12, "bracket", {2, 1, 1}, 0.014, "blue",
                       {port(0, .5, .5, "-x", P), port(1.5, .5, 1, "+z", S),
                        port(1.5, .5, 0, "-z", P)}));
  types.push_back(part(13, "cap", {1, 1, 1}, 0.006, "red",
                       {port(.5, .5, 0, "-z", P)}));
  types.push_back(part(14, "cross_plate", {3, 3, 1}, 0.045, "green",
                       {port(3, 1.5, .5, "+x", S), port(0, 1.5, .5, "-x", S),
                        port(1.5, 3, .5, "+y", S), port(1.5, 0, .5, "-y", S),
                        port(1.5, 1.5, 1, "+z", S), port(1.5, 1.5, 0, "-z", P)}));
  types.push_back(part(15, "spike", {1, 1, 2}, 0.008, "red",
                       {port(.5, .5, 0, "-z", P)}));
  return {{"schema_version", kCatalogSchemaVersion},
          {"name", "nodal"},
          {"cell_size", 0.04},
          {"types", types},
          {"rules", json::array({{{"class_a", "peg"}, {"class_b", "socket"}, {"allowed", true}},
                                 {{"class_a", "socket"}, {"class_b", "peg"}, {"allowed", true}},
                                 {{"class_a", "peg"}, {"class_b", "peg"}, {"allowed", false}},
                                 {{"class_a", "socket"}, {"class_b", "socket"}, {"allowed", false}}})}};
}

Inventory unlimited_inventory(const Catalog& catalog, int count) {
  Inventory inv;
  for (const auto& t : catalog.types()) {
    inv.counts[t.type_id] = count;
  }
  return inv;
}

AssemblyState random_model(const Catalog& catalog, CounterRng& rng, int n,
                           const LatticeBounds& bounds, bool ground_anchoring, int max_types) {
  std::vector<int> types;
  for (const auto& t : catalog.types()) {
    types.push_back(t.type_id);
  }
  if (max_types > 0 && max_types < static_cast<int>(types.size())) {
    for (std::size_t i = 0; i + 1 < types.size(); ++i) {
      const auto j = i + rng.below(types.size() - i);
      std::swap(types[i], types[j]);
    }
    types.resize(static_cast<std::size_t>(max_types));
    std::sort(types.begin(), types.end());
  }

  const PlacementRules rules{ground_anchoring};
  AssemblyState state;
  state.inventory = unlimited_inventory(catalog);
  for (int i = 0; i < n; ++i) {
    std::vector<Placement> ground;
    std::vector<Placement> raised;
    for (int t : types) {
      for (const auto& p : legal_placements(state, catalog, t, bounds, rules)) {
        if (p.cell.z() == 0) {
          ground.push_back(p);
        } else if (!ground_anchoring || rests_on_lower(state, p, catalog)) {
          raised.push_back(p);
        }
      }
    }
    if (ground.empty() && raised.empty()) {
      break;
    }
    // Bricks mostly stack; a free choice would spread them over the table.
    std::vector<Placement> all = ground;
    all.insert(all.end(), raised.begin(), raised.end());
    const bool stack = ground_anchoring && !raised.empty() && (ground.empty() || rng.uniform() < 0.75);
    const auto& pool = !ground_anchoring ? all : stack ? raised : ground;
    Placement p = pool[rng.below(pool.size())];
    p.instance_id = state.next_instance_id();
    state = apply_placement(state, p, catalog, rules);
  }
  return state;
}

Scenario make_scenario(const ScenarioSpec& spec) {
  Scenario s;
  s.name = spec.name;
  s.seed = spec.seed;
  s.catalog = spec.catalog;
  s.model = build_model(spec.model.placements, spec.catalog);
  s.mode = spec.mode;
  s.noise = spec.noise;
  s.flags = spec.flags;
  s.bounds = spec.bounds;
  const double cell = spec.catalog.cell_size();
  s.lattice.cell_size = cell;

  CounterRng rng(spec.seed, streams::kLayout, 0, 0);
  std::vector<int> part_types;
  for (const auto& p : s.model.placements) {
    part_types.push_back(p.type_id);
  }
  if (spec.distractor_types.empty()) {
    for (int i = 0; i < spec.distractors; ++i) {
      const auto& types = spec.catalog.types();
      part_types.push_back(types[rng.below(types.size())].type_id);
    }
  } else {
    part_types.insert(part_types.end(), spec.distractor_types.begin(), spec.distractor_types.end());
  }

  const double max_dim = spec.catalog.max_footprint_dim() * cell;
  const double spacing = max_dim + 0.08;
  const int n = static_cast<int>(part_types.size());
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
  const double x_lo = spec.bounds.min.x() * cell;
  const double x_hi = spec.bounds.max.x() * cell;
  const double y_top = spec.bounds.min.y() * cell - 0.06 - 0.5 * max_dim;
  const double x0 = 0.5 * (x_lo + x_hi) - 0.5 * (cols - 1) * spacing;
  double layout_y_min = y_top;
  for (int i = 0; i < n; ++i) {
    const auto& type = spec.catalog.type(part_types[static_cast<std::size_t>(i)]);
    const double x = x0 + (i % cols) * spacing;
    const double y = y_top - (i / cols) * spacing;
    layout_y_min = std::min(layout_y_min, y);
    const Vec3 half = 0.5 * type.footprint.cast<double>() * cell;
    s.layout.push_back({type.type_id, FootprintBox3D{Vec3(x, y, half.z()), half, 0.0}});
    s.inventory.counts[type.type_id] += 1;
  }
  for (const auto& t : spec.catalog.types()) {
    s.inventory.counts.try_emplace(t.type_id, 0);
  }

  const double lo_x = std::min(x_lo, x0 - 0.5 * max_dim);
  const double hi_x = std::max(x_hi, x0 + (cols - 1) * spacing + 0.5 * max_dim);
  const double lo_y = layout_y_min - 0.5 * max_dim;
  const double hi_y = spec.bounds.max.y() * cell;
  const Vec3 target(0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y), 0.0);
  const double radius = 0.5 * std::hypot(hi_x - lo_x, hi_y - lo_y);

  CounterRng cam_rng(spec.seed, streams::kGenerator, 0, 0);
  const double azimuth = deg_to_rad(-180.0 + 360.0 * cam_rng.uniform());
  const double elevation = deg_to_rad(
      spec.elevation_min_deg + (spec.elevation_max_deg - spec.elevation_min_deg) * cam_rng.uniform());
  const double hfov = deg_to_rad(60.0);
  const int width = 640;
  const int height = 480;
  const double vfov = 2.0 * std::atan(std::tan(0.5 * hfov) * height / width);
  const double distance =
      1.2 * radius / std::sin(0.5 * vfov) + spec.bounds.max.z() * cell;
  const CameraPose pose = CameraPose::orbit(target, azimuth, elevation, distance, hfov, width, height);
  s.camera = {{0, pose}, {std::max(1, spec.frames - 1), pose}};

  s.goals.target_height = structure_height(s.model, s.catalog);
  s.goals.max_components = static_cast<int>(s.model.placements.size());
  // The parsed form is what sessions see; returning it keeps both identical.
  return scenario_from_json(scenario_to_json(s));
}

} // namespace ae
