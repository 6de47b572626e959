#include "assembly_engine/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "assembly_engine/errors.hpp"

namespace ae {

using nlohmann::json;

Eigen::Vector3i axis_vector(Axis a) {
  switch (a) {
  case Axis::PosX: return {1, 0, 0};
  case Axis::NegX: return {-1, 0, 0};
  case Axis::PosY: return {0, 1, 0};
  case Axis::NegY: return {0, -1, 0};
  case Axis::PosZ: return {0, 0, 1};
  case Axis::NegZ: return {0, 0, -1};
  }
  return {0, 0, 0};
}

Axis opposite(Axis a) {
  switch (a) {
  case Axis::PosX: return Axis::NegX;
  case Axis::NegX: return Axis::PosX;
  case Axis::PosY: return Axis::NegY;
  case Axis::NegY: return Axis::PosY;
  case Axis::PosZ: return Axis::NegZ;
  case Axis::NegZ: return Axis::PosZ;
  }
  return a;
}

Axis rotate_axis(Axis a, int quarter_turns) {
  int q = ((quarter_turns % 4) + 4) % 4;
  for (; q > 0; --q) {
    switch (a) {
    case Axis::PosX: a = Axis::PosY; break;
    case Axis::PosY: a = Axis::NegX; break;
    case Axis::NegX: a = Axis::NegY; break;
    case Axis::NegY: a = Axis::PosX; break;
    default: return a;
    }
  }
  return a;
}

std::string to_string(Axis a) {
  switch (a) {
  case Axis::PosX: return "+x";
  case Axis::NegX: return "-x";
  case Axis::PosY: return "+y";
  case Axis::NegY: return "-y";
  case Axis::PosZ: return "+z";
  case Axis::NegZ: return "-z";
  }
  return "?";
}

Axis axis_from_string(const std::string& s) {
  if (s == "+x") return Axis::PosX;
  if (s == "-x") return Axis::NegX;
  if (s == "+y") return Axis::PosY;
  if (s == "-y") return Axis::NegY;
  if (s == "+z") return Axis::PosZ;
  if (s == "-z") return Axis::NegZ;
  fail(ErrorCode::MalformedDocument, "bad port direction '" + s + "'");
}

int Inventory::count(int type_id) const {
  const auto it = counts.find(type_id);
  return it == counts.end() ? 0 : it->second;
}

bool Catalog::has_type(int type_id) const {
  const auto it = std::lower_bound(types_.begin(), types_.end(), type_id,
                                   [](const ComponentType& t, int id) { return t.type_id < id; });
  return it != types_.end() && it->type_id == type_id;
}

const ComponentType& Catalog::type(int type_id) const {
  const auto it = std::lower_bound(types_.begin(), types_.end(), type_id,
                                   [](const ComponentType& t, int id) { return t.type_id < id; });
  if (it == types_.end() || it->type_id != type_id) {
    fail(ErrorCode::UnknownType, std::to_string(type_id));
  }
  return *it;
}

bool Catalog::classes_allowed(const std::string& a, const std::string& b) const {
  return allowed_.count({a, b}) > 0;
}

int Catalog::max_footprint_dim() const {
  int m = 1;
  for (const auto& t : types_) {
    m = std::max(m, t.footprint.maxCoeff());
  }
  return m;
}

int Catalog::max_height_dim() const {
  int m = 1;
  for (const auto& t : types_) {
    m = std::max(m, t.footprint.z());
  }
  return m;
}

namespace {

Port parse_port(const json& j, const ComponentType& t) {
  Port p;
  const auto& off = j.at("local_offset");
  if (!off.is_array() || off.size() != 3) {
    fail(ErrorCode::MalformedDocument, "port local_offset must have 3 entries");
  }
  p.local_offset = {off[0].get<double>(), off[1].get<double>(), off[2].get<double>()};
  p.direction = axis_from_string(j.at("direction").get<std::string>());
  p.compatibility_class = j.at("compatibility_class").get<std::string>();
  for (int i = 0; i < 3; ++i) {
    if (p.local_offset[i] < 0.0 || p.local_offset[i] > t.footprint[i]) {
      fail(ErrorCode::MalformedDocument,
           "port offset outside footprint of type " + std::to_string(t.type_id));
    }
  }
  return p;
}

ComponentType parse_type(const json& j) {
  ComponentType t;
  t.type_id = j.at("type_id").get<int>();
  t.name = j.value("name", "");
  const auto& fp = j.at("footprint");
  if (!fp.is_array() || fp.size() != 3) {
    fail(ErrorCode::MalformedDocument, "footprint must have 3 entries");
  }
  t.footprint = {fp[0].get<int>(), fp[1].get<int>(), fp[2].get<int>()};
  if ((t.footprint.array() < 1).any()) {
    fail(ErrorCode::MalformedDocument, "footprint must be >= (1,1,1)");
  }
  t.mass = j.at("mass").get<double>();
  if (!(t.mass > 0.0)) {
    fail(ErrorCode::MalformedDocument, "mass must be positive");
  }
  t.color_tag = j.value("color_tag", "");
  for (const auto& pj : j.value("ports", json::array())) {
    t.ports.push_back(parse_port(pj, t));
  }
  return t;
}

} // namespace

Catalog load_catalog(const json& doc) {
  Catalog c;
  try {
    if (!doc.is_object()) {
      fail(ErrorCode::MalformedDocument, "catalog must be an object");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kCatalogSchemaVersion) {
      fail(ErrorCode::MalformedDocument, "unsupported schema_version " + std::to_string(version));
    }
    c.cell_size_ = doc.value("cell_size", 0.04);
    if (!(c.cell_size_ > 0.0)) {
      fail(ErrorCode::MalformedDocument, "cell_size must be positive");
    }

    std::set<int> seen;
    for (const auto& tj : doc.value("types", json::array())) {
      ComponentType t = parse_type(tj);
      if (!seen.insert(t.type_id).second) {
        fail(ErrorCode::DuplicateTypeId, std::to_string(t.type_id));
      }
      c.types_.push_back(std::move(t));
    }
    std::sort(c.types_.begin(), c.types_.end(),
              [](const auto& a, const auto& b) { return a.type_id < b.type_id; });

    std::map<std::pair<std::string, std::string>, bool> stated;
    for (const auto& rj : doc.value("rules", json::array())) {
      AggregationRule r{rj.at("class_a").get<std::string>(), rj.at("class_b").get<std::string>(),
                        rj.at("allowed").get<bool>()};
      const auto key = std::make_pair(r.class_a, r.class_b);
      if (auto it = stated.find(key); it != stated.end() && it->second != r.allowed) {
        fail(ErrorCode::MalformedDocument, r.class_a + "/" + r.class_b + " stated twice");
      }
      stated[key] = r.allowed;
    }
    for (const auto& [key, allowed] : stated) {
      const auto mirror = std::make_pair(key.second, key.first);
      const auto it = stated.find(mirror);
      if (it == stated.end()) {
        c.warnings_.push_back("rule " + key.first + "/" + key.second +
                              " has no mirror; mirrored automatically");
      } else if (it->second != allowed) {
        fail(ErrorCode::AsymmetricRule, key.first + "/" + key.second);
      }
    }
    std::map<std::pair<std::string, std::string>, bool> closed = stated;
    for (const auto& [key, allowed] : stated) {
      closed.emplace(std::make_pair(key.second, key.first), allowed);
    }
    for (const auto& [key, allowed] : closed) {
      c.rules_.push_back({key.first, key.second, allowed});
      if (allowed) {
        c.allowed_.insert(key);
      }
    }

    if (doc.contains("inventory")) {
      for (const auto& [k, v] : doc.at("inventory").items()) {
        const int id = std::stoi(k);
        const int n = v.get<int>();
        if (n < 0) {
          fail(ErrorCode::MalformedDocument, "negative inventory for type " + k);
        }
        if (!seen.count(id)) {
          fail(ErrorCode::UnknownType, "inventory references type " + k);
        }
        c.inventory_.counts[id] = n;
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  } catch (const std::invalid_argument& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
  return c;
}

Catalog load_catalog_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedDocument, e.what());
  }
  return load_catalog(doc);
}

json Catalog::to_json() const {
  json doc;
  doc["schema_version"] = kCatalogSchemaVersion;
  doc["cell_size"] = cell_size_;
  json types = json::array();
  for (const auto& t : types_) {
    json ports = json::array();
    for (const auto& p : t.ports) {
      ports.push_back({{"local_offset", {p.local_offset.x(), p.local_offset.y(), p.local_offset.z()}},
                       {"direction", to_string(p.direction)},
                       {"compatibility_class", p.compatibility_class}});
    }
    types.push_back({{"type_id", t.type_id},
                     {"name", t.name},
                     {"footprint", {t.footprint.x(), t.footprint.y(), t.footprint.z()}},
                     {"mass", t.mass},
                     {"ports", ports},
                     {"color_tag", t.color_tag}});
  }
  doc["types"] = types;
  json rules = json::array();
  for (const auto& r : rules_) {
    rules.push_back({{"class_a", r.class_a}, {"class_b", r.class_b}, {"allowed", r.allowed}});
  }
  doc["rules"] = rules;
  json inv = json::object();
  for (const auto& [id, n] : inventory_.counts) {
    inv[std::to_string(id)] = n;
  }
  doc["inventory"] = inv;
  return doc;
}

bool ports_compatible(const Catalog& catalog, int type_a, int port_a, int type_b, int port_b) {
  const auto& ta = catalog.type(type_a);
  const auto& tb = catalog.type(type_b);
  if (port_a < 0 || port_a >= static_cast<int>(ta.ports.size()) || port_b < 0 ||
      port_b >= static_cast<int>(tb.ports.size())) {
    fail(ErrorCode::UnknownPort);
  }
  const Port& pa = ta.ports[static_cast<std::size_t>(port_a)];
  const Port& pb = tb.ports[static_cast<std::size_t>(port_b)];
  return pa.direction == opposite(pb.direction) &&
         catalog.classes_allowed(pa.compatibility_class, pb.compatibility_class);
}

} // namespace ae
