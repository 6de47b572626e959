#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace ae {

inline constexpr int kCatalogSchemaVersion = 1;

/// Unit lattice axis.
enum class Axis { PosX, NegX, PosY, NegY, PosZ, NegZ };

Eigen::Vector3i axis_vector(Axis a);
Axis opposite(Axis a);
/// Rotates a lattice axis by quarter turns about +z.
Axis rotate_axis(Axis a, int quarter_turns);
std::string to_string(Axis a);
Axis axis_from_string(const std::string& s);

struct Port {
  Eigen::Vector3d local_offset = Eigen::Vector3d::Zero(); // lattice units from the footprint min corner
  Axis direction = Axis::PosZ;
  std::string compatibility_class;
};

struct ComponentType {
  int type_id = 0;
  std::string name;
  Eigen::Vector3i footprint = Eigen::Vector3i::Ones(); // (dx, dy, dz) lattice units
  double mass = 1.0;                                  // kg, lumped at the footprint centroid
  std::vector<Port> ports;
  std::string color_tag;
};

struct AggregationRule {
  std::string class_a;
  std::string class_b;
  bool allowed = false;
};

struct Inventory {
  std::map<int, int> counts;

  int count(int type_id) const;
  bool operator==(const Inventory&) const = default;
};

class Catalog {
public:
  const std::vector<ComponentType>& types() const { return types_; }
  const std::vector<AggregationRule>& rules() const { return rules_; }
  const Inventory& inventory() const { return inventory_; }
  /// Non-fatal load diagnostics, e.g. auto-mirrored rules.
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Edge length of one lattice cell in metres.
  double cell_size() const { return cell_size_; }

  bool has_type(int type_id) const;
  /// Throws Error(UnknownType).
  const ComponentType& type(int type_id) const;
  bool classes_allowed(const std::string& a, const std::string& b) const;
  /// Largest footprint dimension over all types, lattice units.
  int max_footprint_dim() const;
  int max_height_dim() const;

  void set_inventory(Inventory inv) { inventory_ = std::move(inv); }

  nlohmann::json to_json() const;

private:
  friend Catalog load_catalog(const nlohmann::json& doc);

  std::vector<ComponentType> types_; // sorted by type_id
  std::vector<AggregationRule> rules_;
  std::set<std::pair<std::string, std::string>> allowed_;
  Inventory inventory_;
  std::vector<std::string> warnings_;
  double cell_size_ = 0.04;
};

/// Parses and validates a catalog document. Rules are closed under symmetry:
/// a rule stated in one direction only is mirrored and a warning recorded,
/// while contradictory directions raise AsymmetricRule.
Catalog load_catalog(const nlohmann::json& doc);
Catalog load_catalog_file(const std::filesystem::path& path);

/// True iff the two ports face each other and their classes may connect.
/// Directions are compared in the types' unrotated frames.
bool ports_compatible(const Catalog& catalog, int type_a, int port_a, int type_b, int port_b);

} // namespace ae
