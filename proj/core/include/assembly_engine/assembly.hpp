#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "assembly_engine/catalog.hpp"
#include "assembly_engine/geometry.hpp"

namespace ae {

/// One component instance on the integer lattice. `cell` is the min corner of
/// the rotated footprint; `quarter_turns` is the yaw in 90 degree steps.
struct Placement {
  int instance_id = 0;
  int type_id = 0;
  Eigen::Vector3i cell = Eigen::Vector3i::Zero();
  int quarter_turns = 0;

  int yaw_degrees() const { return 90 * quarter_turns; }
  bool operator==(const Placement& o) const {
    return instance_id == o.instance_id && type_id == o.type_id && cell == o.cell &&
           quarter_turns == o.quarter_turns;
  }
};

/// Same type, cell and yaw; instance ids ignored.
bool same_pose(const Placement& a, const Placement& b);

struct Edge {
  int instance_a = 0; // instance_a < instance_b
  int port_a = 0;
  int instance_b = 0;
  int port_b = 0;

  auto operator<=>(const Edge&) const = default;
};

struct AssemblyState {
  std::vector<Placement> placements;
  std::vector<Edge> edges;
  Inventory inventory;

  bool empty() const { return placements.empty(); }
  const Placement* find(int instance_id) const;
  int next_instance_id() const;
  bool operator==(const AssemblyState&) const = default;
};

/// Connection policy. With ground anchoring, a placement resting on the table
/// (z = 0) counts as connected to the base even without port edges; this is how
/// layer-by-layer brick models admit several ground bricks.
struct PlacementRules {
  bool ground_anchoring = false;
};

/// Half-open lattice region [min, max).
struct LatticeBounds {
  Eigen::Vector3i min = Eigen::Vector3i::Zero();
  Eigen::Vector3i max = Eigen::Vector3i(8, 8, 8);

  bool contains(const Eigen::Vector3i& c) const;
};

/// Maps lattice cells to world metres on the work plane.
struct LatticeFrame {
  Vec3 origin = Vec3::Zero();
  double cell_size = 0.04;

  FootprintBox3D box(const Placement& p, const Catalog& catalog) const;
};

/// Port position in doubled lattice coordinates (exact for half-unit offsets).
struct WorldPort {
  Eigen::Vector3i pos2;
  Axis direction;
  const std::string* compatibility_class;
  int port_index;
};

Eigen::Vector3i rotated_footprint(const ComponentType& type, int quarter_turns);
std::vector<Eigen::Vector3i> occupied_cells(const Placement& p, const Catalog& catalog);
std::vector<WorldPort> world_ports(const Placement& p, const Catalog& catalog);

/// Smallest quarter-turn count giving the same occupied cells and port set as
/// `p`; used to identify geometrically identical placements.
int canonical_quarter_turns(const Placement& p, const Catalog& catalog);

/// Edges between `p` and the placements already in `state`.
std::vector<Edge> induced_edges(const AssemblyState& state, const Placement& p,
                                const Catalog& catalog);

/// All-pairs edge scan; edges sorted.
std::vector<Edge> compute_all_edges(const std::vector<Placement>& placements,
                                    const Catalog& catalog);

/// Model documents list placements only; this fills in the edges. Throws
/// OverlappingPlacements.
AssemblyState build_model(std::vector<Placement> placements, const Catalog& catalog);

bool has_overlap(const AssemblyState& state, const Placement& p, const Catalog& catalog);

/// True iff the structure forms one connected piece (or, with ground anchoring,
/// every piece touches the table). Empty structures are connected.
bool is_connected(const AssemblyState& state, const PlacementRules& rules = {});

/// Adds a placement with its induced edges and decrements the inventory.
/// Errors: Overlap, NoCompatibleConnection, InventoryExhausted, UnknownType.
AssemblyState apply_placement(const AssemblyState& state, const Placement& placement,
                              const Catalog& catalog, const PlacementRules& rules = {});

/// Every legal placement of `type_id` within `bounds`: no overlap, inventory
/// available, at least one compatible coincident port (or a table cell when the
/// structure is empty or ground anchoring applies). Geometrically identical
/// yaws are reported once. Sorted by (z, y, x, yaw).
std::vector<Placement> legal_placements(const AssemblyState& state, const Catalog& catalog,
                                        int type_id, const LatticeBounds& bounds,
                                        const PlacementRules& rules = {});

/// Structure top in lattice units: max over placements of z + footprint dz.
int structure_height(const AssemblyState& state, const Catalog& catalog);

nlohmann::json to_json(const Placement& p);
Placement placement_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssemblyState& s);
AssemblyState assembly_from_json(const nlohmann::json& j);

} // namespace ae
