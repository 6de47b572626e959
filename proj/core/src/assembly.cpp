#include "assembly_engine/assembly.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "assembly_engine/errors.hpp"

namespace ae {

namespace {

int normalize_turns(int q) { return ((q % 4) + 4) % 4; }

std::int64_t pack(const Eigen::Vector3i& c) {
  // 21 bits per axis, offset so small negatives stay distinct.
  constexpr std::int64_t kBias = 1 << 20;
  return ((c.x() + kBias) << 42) | ((c.y() + kBias) << 21) | (c.z() + kBias);
}

// Doubled local offset after rotating the footprint by q quarter turns about +z
// and shifting its min corner back to the origin.
Eigen::Vector3i rotated_offset2(const Eigen::Vector3d& off, const Eigen::Vector3i& fp, int q) {
  const int x = static_cast<int>(std::lround(2.0 * off.x()));
  const int y = static_cast<int>(std::lround(2.0 * off.y()));
  const int z = static_cast<int>(std::lround(2.0 * off.z()));
  const int dx = 2 * fp.x();
  const int dy = 2 * fp.y();
  switch (normalize_turns(q)) {
  case 1: return {dy - y, x, z};
  case 2: return {dx - x, dy - y, z};
  case 3: return {y, dx - x, z};
  default: return {x, y, z};
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

std::unordered_set<std::int64_t> occupancy(const AssemblyState& state, const Catalog& catalog) {
  std::unordered_set<std::int64_t> occ;
  for (const auto& p : state.placements) {
    for (const auto& c : occupied_cells(p, catalog)) {
      occ.insert(pack(c));
    }
  }
  return occ;
}

bool edge_between(const WorldPort& a, const WorldPort& b, const Catalog& catalog) {
  return a.pos2 == b.pos2 && a.direction == opposite(b.direction) &&
         catalog.classes_allowed(*a.compatibility_class, *b.compatibility_class);
}

Edge make_edge(int inst_a, int port_a, int inst_b, int port_b) {
  if (inst_a < inst_b) {
    return {inst_a, port_a, inst_b, port_b};
  }
  return {inst_b, port_b, inst_a, port_a};
}

using PoseSignature = std::pair<std::vector<std::int64_t>,
                                std::vector<std::tuple<std::int64_t, int, std::string>>>;

PoseSignature signature(const Placement& p, const Catalog& catalog) {
  PoseSignature sig;
  for (const auto& c : occupied_cells(p, catalog)) {
    sig.first.push_back(pack(c));
  }
  for (const auto& wp : world_ports(p, catalog)) {
    sig.second.emplace_back(pack(wp.pos2), static_cast<int>(wp.direction), *wp.compatibility_class);
  }
  std::sort(sig.first.begin(), sig.first.end());
  std::sort(sig.second.begin(), sig.second.end());
  return sig;
}

} // namespace

bool same_pose(const Placement& a, const Placement& b) {
  return a.type_id == b.type_id && a.cell == b.cell &&
         normalize_turns(a.quarter_turns) == normalize_turns(b.quarter_turns);
}

const Placement* AssemblyState::find(int instance_id) const {
  for (const auto& p : placements) {
    if (p.instance_id == instance_id) {
      return &p;
    }
  }
  return nullptr;
}

int AssemblyState::next_instance_id() const {
  int next = 0;
  for (const auto& p : placements) {
    next = std::max(next, p.instance_id + 1);
  }
  return next;
}

bool LatticeBounds::contains(const Eigen::Vector3i& c) const {
  return (c.array() >= min.array()).all() && (c.array() < max.array()).all();
}

FootprintBox3D LatticeFrame::box(const Placement& p, const Catalog& catalog) const {
  const auto& type = catalog.type(p.type_id);
  const Eigen::Vector3i dims = rotated_footprint(type, p.quarter_turns);
  FootprintBox3D b;
  b.center = origin + cell_size * (p.cell.cast<double>() + 0.5 * dims.cast<double>());
  b.half_extents = 0.5 * cell_size * type.footprint.cast<double>();
  b.yaw = normalize_turns(p.quarter_turns) * (std::numbers::pi / 2.0);
  return b;
}

Eigen::Vector3i rotated_footprint(const ComponentType& type, int quarter_turns) {
  const auto& f = type.footprint;
  return normalize_turns(quarter_turns) % 2 == 0 ? f : Eigen::Vector3i(f.y(), f.x(), f.z());
}

std::vector<Eigen::Vector3i> occupied_cells(const Placement& p, const Catalog& catalog) {
  const Eigen::Vector3i d = rotated_footprint(catalog.type(p.type_id), p.quarter_turns);
  std::vector<Eigen::Vector3i> cells;
  cells.reserve(static_cast<std::size_t>(d.prod()));
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x) {
        cells.emplace_back(p.cell + Eigen::Vector3i(x, y, z));
      }
    }
  }
  return cells;
}

std::vector<WorldPort> world_ports(const Placement& p, const Catalog& catalog) {
  const auto& type = catalog.type(p.type_id);
  std::vector<WorldPort> out;
  out.reserve(type.ports.size());
  for (std::size_t i = 0; i < type.ports.size(); ++i) {
    const auto& port = type.ports[i];
    out.push_back({2 * p.cell + rotated_offset2(port.local_offset, type.footprint, p.quarter_turns),
                   rotate_axis(port.direction, p.quarter_turns), &port.compatibility_class,
                   static_cast<int>(i)});
  }
  return out;
}

int canonical_quarter_turns(const Placement& p, const Catalog& catalog) {
  Placement probe = p;
  probe.cell = Eigen::Vector3i::Zero();
  probe.quarter_turns = normalize_turns(p.quarter_turns);
  const auto target = signature(probe, catalog);
  for (int q = 0; q < probe.quarter_turns; ++q) {
    Placement alt = probe;
    alt.quarter_turns = q;
    if (signature(alt, catalog) == target) {
      return q;
    }
  }
  return probe.quarter_turns;
}

std::vector<Edge> induced_edges(const AssemblyState& state, const Placement& p,
                                const Catalog& catalog) {
  std::vector<Edge> edges;
  const auto mine = world_ports(p, catalog);
  for (const auto& q : state.placements) {
    const auto theirs = world_ports(q, catalog);
    for (const auto& a : mine) {
      for (const auto& b : theirs) {
        if (edge_between(a, b, catalog)) {
          edges.push_back(make_edge(p.instance_id, a.port_index, q.instance_id, b.port_index));
        }
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<Edge> compute_all_edges(const std::vector<Placement>& placements,
                                    const Catalog& catalog) {
  std::vector<std::vector<WorldPort>> ports;
  ports.reserve(placements.size());
  for (const auto& p : placements) {
    ports.push_back(world_ports(p, catalog));
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    for (std::size_t j = i + 1; j < placements.size(); ++j) {
      for (const auto& a : ports[i]) {
        for (const auto& b : ports[j]) {
          if (edge_between(a, b, catalog)) {
            edges.push_back(make_edge(placements[i].instance_id, a.port_index,
                                      placements[j].instance_id, b.port_index));
          }
        }
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

AssemblyState build_model(std::vector<Placement> placements, const Catalog& catalog) {
  std::unordered_set<std::int64_t> occ;
  std::set<int> ids;
  for (auto& p : placements) {
    p.quarter_turns = normalize_turns(p.quarter_turns);
    if (!ids.insert(p.instance_id).second) {
      fail(ErrorCode::OverlappingPlacements, "duplicate instance id " + std::to_string(p.instance_id));
    }
    for (const auto& c : occupied_cells(p, catalog)) {
      if (!occ.insert(pack(c)).second) {
        fail(ErrorCode::OverlappingPlacements,
             "instance " + std::to_string(p.instance_id) + " overlaps another placement");
      }
    }
  }
  AssemblyState state;
  state.edges = compute_all_edges(placements, catalog);
  state.placements = std::move(placements);
  return state;
}

bool has_overlap(const AssemblyState& state, const Placement& p, const Catalog& catalog) {
  const auto occ = occupancy(state, catalog);
  for (const auto& c : occupied_cells(p, catalog)) {
    if (c.z() < 0 || occ.count(pack(c))) {
      return true;
    }
  }
  return false;
}

bool is_connected(const AssemblyState& state, const PlacementRules& rules) {
  const std::size_t n = state.placements.size();
  if (n == 0) {
    return true;
  }
  // Node n is the table.
  UnionFind uf(n + 1);
  std::vector<std::pair<int, std::size_t>> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    index.emplace_back(state.placements[i].instance_id, i);
  }
  std::sort(index.begin(), index.end());
  auto lookup = [&](int id) -> int {
    const auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(id, std::size_t{0}));
    return (it != index.end() && it->first == id) ? static_cast<int>(it->second) : -1;
  };
  for (const auto& e : state.edges) {
    const int a = lookup(e.instance_a);
    const int b = lookup(e.instance_b);
    if (a >= 0 && b >= 0) {
      uf.unite(a, b);
    }
  }

  bool grounded = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.placements[i].cell.z() == 0) {
      grounded = true;
      if (rules.ground_anchoring) {
        uf.unite(static_cast<int>(i), static_cast<int>(n));
      }
    }
  }
  if (!grounded) {
    return false;
  }
  const int root = rules.ground_anchoring ? uf.find(static_cast<int>(n)) : uf.find(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (uf.find(static_cast<int>(i)) != root) {
      return false;
    }
  }
  return true;
}

AssemblyState apply_placement(const AssemblyState& state, const Placement& placement,
                              const Catalog& catalog, const PlacementRules& rules) {
  Placement p = placement;
  p.quarter_turns = normalize_turns(p.quarter_turns);
  catalog.type(p.type_id);
  if (state.find(p.instance_id) != nullptr) {
    throw std::invalid_argument("instance id " + std::to_string(p.instance_id) + " already placed");
  }
  if (has_overlap(state, p, catalog)) {
    fail(ErrorCode::Overlap, "instance " + std::to_string(p.instance_id));
  }
  auto edges = induced_edges(state, p, catalog);
  const bool on_table = p.cell.z() == 0;
  if (state.empty()) {
    if (!on_table) {
      fail(ErrorCode::NoCompatibleConnection, "first placement must rest on the table");
    }
  } else if (edges.empty() && !(rules.ground_anchoring && on_table)) {
    fail(ErrorCode::NoCompatibleConnection, "instance " + std::to_string(p.instance_id));
  }
  if (state.inventory.count(p.type_id) < 1) {
    fail(ErrorCode::InventoryExhausted, "type " + std::to_string(p.type_id));
  }

  AssemblyState next = state;
  next.placements.push_back(p);
  next.edges.insert(next.edges.end(), edges.begin(), edges.end());
  next.inventory.counts[p.type_id] -= 1;
  return next;
}

std::vector<Placement> legal_placements(const AssemblyState& state, const Catalog& catalog,
                                        int type_id, const LatticeBounds& bounds,
                                        const PlacementRules& rules) {
  const auto& type = catalog.type(type_id);
  std::vector<Placement> out;
  if (state.inventory.count(type_id) < 1) {
    return out;
  }

  std::vector<int> yaws;
  for (int q = 0; q < 4; ++q) {
    Placement probe{0, type_id, Eigen::Vector3i::Zero(), q};
    if (canonical_quarter_turns(probe, catalog) == q) {
      yaws.push_back(q);
    }
  }

  const auto occ = occupancy(state, catalog);
  const int next_id = state.next_instance_id();
  std::set<std::tuple<int, int, int, int>> seen; // (z, y, x, q)

  auto fits = [&](const Placement& p) {
    for (const auto& c : occupied_cells(p, catalog)) {
      if (!bounds.contains(c) || occ.count(pack(c))) {
        return false;
      }
    }
    return true;
  };
  auto consider = [&](const Placement& p) {
    const auto key = std::make_tuple(p.cell.z(), p.cell.y(), p.cell.x(), p.quarter_turns);
    if (seen.count(key) || !fits(p)) {
      return;
    }
    seen.insert(key);
    out.push_back(p);
  };

  if (state.empty() || rules.ground_anchoring) {
    for (int q : yaws) {
      for (int y = bounds.min.y(); y < bounds.max.y(); ++y) {
        for (int x = bounds.min.x(); x < bounds.max.x(); ++x) {
          if (bounds.min.z() > 0) {
            continue;
          }
          consider(Placement{next_id, type_id, Eigen::Vector3i(x, y, 0), q});
        }
      }
    }
  }

  for (const auto& existing : state.placements) {
    for (const auto& wp : world_ports(existing, catalog)) {
      for (int q : yaws) {
        for (const auto& port : type.ports) {
          if (rotate_axis(port.direction, q) != opposite(wp.direction) ||
              !catalog.classes_allowed(port.compatibility_class, *wp.compatibility_class)) {
            continue;
          }
          const Eigen::Vector3i cell2 =
              wp.pos2 - rotated_offset2(port.local_offset, type.footprint, q);
          if (cell2.x() % 2 != 0 || cell2.y() % 2 != 0 || cell2.z() % 2 != 0) {
            continue;
          }
          consider(Placement{next_id, type_id, cell2 / 2, q});
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Placement& a, const Placement& b) {
    return std::make_tuple(a.cell.z(), a.cell.y(), a.cell.x(), a.quarter_turns) <
           std::make_tuple(b.cell.z(), b.cell.y(), b.cell.x(), b.quarter_turns);
  });
  return out;
}

int structure_height(const AssemblyState& state, const Catalog& catalog) {
  int h = 0;
  for (const auto& p : state.placements) {
    h = std::max(h, p.cell.z() + catalog.type(p.type_id).footprint.z());
  }
  return h;
}

nlohmann::json to_json(const Placement& p) {
  return {{"instance_id", p.instance_id},
          {"type_id", p.type_id},
          {"cell", {p.cell.x(), p.cell.y(), p.cell.z()}},
          {"yaw", p.yaw_degrees()}};
}

Placement placement_from_json(const nlohmann::json& j) {
  try {
    Placement p;
    p.instance_id = j.at("instance_id").get<int>();
    p.type_id = j.at("type_id").get<int>();
    const auto& c = j.at("cell");
    if (!c.is_array() || c.size() != 3) {
      fail(ErrorCode::MalformedDocument, "cell must have 3 entries");
    }
    p.cell = {c[0].get<int>(), c[1].get<int>(), c[2].get<int>()};
    const int yaw = j.value("yaw", 0);
    if (yaw % 90 != 0) {
      fail(ErrorCode::MalformedDocument, "yaw must be a multiple of 90 degrees");
    }
    p.quarter_turns = normalize_turns(yaw / 90);
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
}

nlohmann::json to_json(const AssemblyState& s) {
  nlohmann::json placements = nlohmann::json::array();
  for (const auto& p : s.placements) {
    placements.push_back(to_json(p));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : s.edges) {
    edges.push_back({e.instance_a, e.port_a, e.instance_b, e.port_b});
  }
  nlohmann::json inv = nlohmann::json::object();
  for (const auto& [id, n] : s.inventory.counts) {
    inv[std::to_string(id)] = n;
  }
  return {{"placements", placements}, {"edges", edges}, {"inventory", inv}};
}

AssemblyState assembly_from_json(const nlohmann::json& j) {
  AssemblyState s;
  try {
    for (const auto& pj : j.at("placements")) {
      s.placements.push_back(placement_from_json(pj));
    }
    for (const auto& ej : j.value("edges", nlohmann::json::array())) {
      s.edges.push_back({ej[0].get<int>(), ej[1].get<int>(), ej[2].get<int>(), ej[3].get<int>()});
    }
    const auto inventory = j.value("inventory", nlohmann::json::object());
    for (const auto& [k, v] : inventory.items()) {
      s.inventory.counts[std::stoi(k)] = v.get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
  return s;
}

} // namespace ae
