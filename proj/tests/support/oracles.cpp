#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include <Eigen/LU>

namespace oracle {

using ae::Catalog;
using ae::Placement;
using Cell = std::array<int, 3>;

// ---- camera ----------------------------------------------------------------

ae::Mat3 intrinsics(const ae::CameraPose& camera) {
  const double f = (camera.width / 2.0) / std::tan(camera.hfov / 2.0);
  ae::Mat3 k;
  k << f, 0, camera.width / 2.0, 0, f, camera.height / 2.0, 0, 0, 1;
  return k;
}

ae::Mat3 rotation_from_quaternion(const ae::CameraPose& camera) {
  const auto& q = camera.orientation;
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  ae::Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w), //
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),  //
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return r;
}

Vec3 ray_direction(const ae::CameraPose& camera, const Vec2& pixel) {
  const Vec3 cam = intrinsics(camera).inverse() * Vec3(pixel.x(), pixel.y(), 1.0);
  return (rotation_from_quaternion(camera) * cam).normalized();
}

std::optional<Vec2> project(const ae::CameraPose& camera, const Vec3& world) {
  const Vec3 cam = rotation_from_quaternion(camera).transpose() * (world - camera.position);
  if (cam.z() <= 0.0) {
    return std::nullopt;
  }
  const Vec3 h = intrinsics(camera) * cam;
  return Vec2(h.x() / h.z(), h.y() / h.z());
}

std::optional<Vec3> ray_plane(const Vec3& origin, const Vec3& dir, const ae::WorkPlane& plane) {
  const double denom = plane.normal.dot(dir);
  if (std::abs(denom) < 1e-12) {
    return std::nullopt;
  }
  const double t = plane.normal.dot(plane.origin - origin) / denom;
  if (t <= 0.0) {
    return std::nullopt;
  }
  return origin + t * dir;
}

std::optional<Vec3> Homography::map(const Vec2& pixel) const {
  const Vec3 q = h * Vec3(pixel.x(), pixel.y(), 1.0);
  if (std::abs(q.z()) < 1e-15) {
    return std::nullopt;
  }
  return origin + (q.x() / q.z()) * e1 + (q.y() / q.z()) * e2;
}

Homography dlt_homography(const ae::CameraPose& camera, const ae::WorkPlane& plane) {
  Homography out;
  out.origin = plane.origin;
  const Vec3 n = plane.normal.normalized();
  const Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  out.e1 = n.cross(seed).normalized();
  out.e2 = n.cross(out.e1);

  // Reference pixels around the image centre, normalised by the image width.
  const double w = camera.width;
  const double h = camera.height;
  const std::array<Vec2, 4> px{Vec2(0.3 * w, 0.3 * h), Vec2(0.7 * w, 0.3 * h),
                               Vec2(0.7 * w, 0.7 * h), Vec2(0.3 * w, 0.7 * h)};
  Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const auto hit = ray_plane(camera.position, ray_direction(camera, px[i]), plane);
    const Vec3 d = hit.value_or(Vec3::Zero()) - out.origin;
    const double X = d.dot(out.e1);
    const double Y = d.dot(out.e2);
    const double u = px[i].x() / w;
    const double v = px[i].y() / w;
    a.row(2 * i) << u, v, 1, 0, 0, 0, -u * X, -v * X;
    a.row(2 * i + 1) << 0, 0, 0, u, v, 1, -u * Y, -v * Y;
    b(2 * i) = X;
    b(2 * i + 1) = Y;
  }
  const Eigen::Matrix<double, 8, 1> x = a.fullPivLu().solve(b);
  ae::Mat3 hn;
  hn << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), 1.0;
  ae::Mat3 scale = ae::Mat3::Identity();
  scale(0, 0) = scale(1, 1) = 1.0 / w;
  out.h = hn * scale;
  return out;
}

// ---- boxes -----------------------------------------------------------------

bool inside(const Vec3& p, const ae::FootprintBox3D& b, double slack) {
  const Vec3 d = p - b.center;
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double lx = c * d.x() + s * d.y();
  const double ly = -s * d.x() + c * d.y();
  return std::abs(lx) <= b.half_extents.x() + slack && std::abs(ly) <= b.half_extents.y() + slack &&
         std::abs(d.z()) <= b.half_extents.z() + slack;
}

namespace {

std::array<Vec2, 4> footprint_corners(const ae::FootprintBox3D& b, double slack) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hx = b.half_extents.x() + slack;
  const double hy = b.half_extents.y() + slack;
  std::array<Vec2, 4> out;
  const std::array<Vec2, 4> local{Vec2(-hx, -hy), Vec2(hx, -hy), Vec2(hx, hy), Vec2(-hx, hy)};
  for (int i = 0; i < 4; ++i) {
    out[i] = Vec2(b.center.x() + c * local[i].x() - s * local[i].y(),
                  b.center.y() + s * local[i].x() + c * local[i].y());
  }
  return out;
}

// Some sampled point of a's outline lies in b (in the plane).
bool outline_hits(const ae::FootprintBox3D& a, const ae::FootprintBox3D& b, int per_edge,
                  double slack) {
  const auto corners = footprint_corners(a, slack);
  for (int e = 0; e < 4; ++e) {
    const Vec2 p0 = corners[e];
    const Vec2 p1 = corners[(e + 1) % 4];
    for (int i = 0; i <= per_edge; ++i) {
      const Vec2 q = p0 + (p1 - p0) * (static_cast<double>(i) / per_edge);
      if (inside(Vec3(q.x(), q.y(), b.center.z()), b, slack)) {
        return true;
      }
    }
  }
  return false;
}

} // namespace

bool sampled_intersect(const ae::FootprintBox3D& a, const ae::FootprintBox3D& b, int samples,
                       double slack) {
  // Vertical extents: sample each interval against the other.
  bool z_overlap = false;
  for (int i = 0; i <= 100 && !z_overlap; ++i) {
    const double t = -1.0 + 2.0 * i / 100.0;
    const double za = a.center.z() + t * (a.half_extents.z() + slack);
    const double zb = b.center.z() + t * (b.half_extents.z() + slack);
    z_overlap = std::abs(za - b.center.z()) <= b.half_extents.z() + slack ||
                std::abs(zb - a.center.z()) <= a.half_extents.z() + slack;
  }
  if (!z_overlap) {
    return false;
  }
  // Two convex outlines meet iff one outline enters the other region.
  const int per_edge = std::max(1, samples / 8);
  return outline_hits(a, b, per_edge, slack) || outline_hits(b, a, per_edge, slack);
}

// ---- lattice ---------------------------------------------------------------

namespace {

// Quarter turn about +z applied q times to an in-plane vector.
Eigen::Vector2d turn(const Eigen::Vector2d& v, int q) {
  const double angle = q * M_PI / 2.0;
  const double c = std::round(std::cos(angle));
  const double s = std::round(std::sin(angle));
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Eigen::Vector3d dims(const Placement& p, const Catalog& catalog) {
  const auto f = catalog.type(p.type_id).footprint.cast<double>();
  const Eigen::Vector2d r = turn(f.head<2>(), p.quarter_turns).cwiseAbs();
  return {r.x(), r.y(), f.z()};
}

std::vector<int> axis_of(ae::Axis a) {
  switch (a) {
  case ae::Axis::PosX: return {1, 0, 0};
  case ae::Axis::NegX: return {-1, 0, 0};
  case ae::Axis::PosY: return {0, 1, 0};
  case ae::Axis::NegY: return {0, -1, 0};
  case ae::Axis::PosZ: return {0, 0, 1};
  case ae::Axis::NegZ: return {0, 0, -1};
  }
  return {0, 0, 0};
}

struct Structure {
  std::set<Cell> occupied;
  std::multimap<Cell, Port> ports;
};

Structure index_structure(const std::vector<Placement>& ps, const Catalog& catalog) {
  Structure s;
  for (const auto& p : ps) {
    for (const auto& c : cells(p, catalog)) {
      s.occupied.insert(c);
    }
    for (auto& port : ports(p, catalog)) {
      s.ports.emplace(port.pos2, port);
    }
  }
  return s;
}

bool joins(const Port& a, const Port& b, const Catalog& catalog) {
  return a.pos2 == b.pos2 && a.dir[0] == -b.dir[0] && a.dir[1] == -b.dir[1] &&
         a.dir[2] == -b.dir[2] && catalog.classes_allowed(a.cls, b.cls);
}

bool in_bounds(const Cell& c, const ae::LatticeBounds& bounds) {
  for (int i = 0; i < 3; ++i) {
    if (c[i] < bounds.min[i] || c[i] >= bounds.max[i]) {
      return false;
    }
  }
  return true;
}

bool legal_against(const Structure& s, bool empty, const Placement& p, const Catalog& catalog,
                   const ae::LatticeBounds& bounds, bool ground_anchoring) {
  for (const auto& c : cells(p, catalog)) {
    if (!in_bounds(c, bounds) || s.occupied.count(c)) {
      return false;
    }
  }
  const bool on_table = p.cell.z() == 0;
  if (empty) {
    return on_table;
  }
  if (ground_anchoring && on_table) {
    return true;
  }
  for (const auto& mine : ports(p, catalog)) {
    const auto [lo, hi] = s.ports.equal_range(mine.pos2);
    for (auto it = lo; it != hi; ++it) {
      if (joins(mine, it->second, catalog)) {
        return true;
      }
    }
  }
  return false;
}

std::map<int, int> type_counts(const std::vector<Placement>& ps) {
  std::map<int, int> out;
  for (const auto& p : ps) {
    out[p.type_id] += 1;
  }
  return out;
}

} // namespace

std::vector<Cell> cells(const Placement& p, const Catalog& catalog) {
  const Eigen::Vector3d d = dims(p, catalog);
  std::vector<Cell> out;
  for (int x = 0; x < d.x(); ++x) {
    for (int y = 0; y < d.y(); ++y) {
      for (int z = 0; z < d.z(); ++z) {
        out.push_back({p.cell.x() + x, p.cell.y() + y, p.cell.z() + z});
      }
    }
  }
  return out;
}

std::vector<Port> ports(const Placement& p, const Catalog& catalog) {
  const auto& type = catalog.type(p.type_id);
  const Eigen::Vector3d f = type.footprint.cast<double>();
  const Eigen::Vector3d d = dims(p, catalog);
  std::vector<Port> out;
  for (const auto& port : type.ports) {
    // Rotate about the footprint centre, then re-anchor at the rotated min corner.
    const Eigen::Vector2d rel = port.local_offset.head<2>() - 0.5 * f.head<2>();
    const Eigen::Vector2d xy = turn(rel, p.quarter_turns) + 0.5 * d.head<2>();
    const Eigen::Vector3d world(p.cell.x() + xy.x(), p.cell.y() + xy.y(),
                                p.cell.z() + port.local_offset.z());
    const auto a = axis_of(port.direction);
    const Eigen::Vector2d dir = turn(Eigen::Vector2d(a[0], a[1]), p.quarter_turns);
    out.push_back({{static_cast<int>(std::lround(2 * world.x())),
                    static_cast<int>(std::lround(2 * world.y())),
                    static_cast<int>(std::lround(2 * world.z()))},
                   {static_cast<int>(std::lround(dir.x())), static_cast<int>(std::lround(dir.y())),
                    a[2]},
                   port.compatibility_class});
  }
  return out;
}

std::string pose_signature(const Placement& p, const Catalog& catalog) {
  auto cs = cells(p, catalog);
  std::sort(cs.begin(), cs.end());
  std::vector<std::string> ps;
  for (const auto& port : ports(p, catalog)) {
    std::ostringstream o;
    o << port.pos2[0] << ',' << port.pos2[1] << ',' << port.pos2[2] << ':' << port.dir[0] << ','
      << port.dir[1] << ',' << port.dir[2] << ':' << port.cls;
    ps.push_back(o.str());
  }
  std::sort(ps.begin(), ps.end());
  std::ostringstream o;
  o << 't' << p.type_id << '|';
  for (const auto& c : cs) {
    o << c[0] << ',' << c[1] << ',' << c[2] << ';';
  }
  o << '|';
  for (const auto& s : ps) {
    o << s << ';';
  }
  return o.str();
}

std::vector<std::string> structure_signature(const std::vector<Placement>& ps,
                                             const Catalog& catalog) {
  std::vector<std::string> out;
  for (const auto& p : ps) {
    out.push_back(pose_signature(p, catalog));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::array<int, 4>> port_joins(const std::vector<Placement>& ps,
                                           const Catalog& catalog) {
  std::vector<std::array<int, 4>> out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < ps.size(); ++j) {
      if (ps[i].instance_id >= ps[j].instance_id) {
        continue;
      }
      const auto pi = ports(ps[i], catalog);
      const auto pj = ports(ps[j], catalog);
      for (std::size_t a = 0; a < pi.size(); ++a) {
        for (std::size_t b = 0; b < pj.size(); ++b) {
          if (joins(pi[a], pj[b], catalog)) {
            out.push_back({ps[i].instance_id, static_cast<int>(a), ps[j].instance_id,
                           static_cast<int>(b)});
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::pair<int, int>> adjacency(const std::vector<Placement>& ps, const Catalog& catalog) {
  std::set<std::pair<int, int>> out;
  for (const auto& j : port_joins(ps, catalog)) {
    out.insert({j[0], j[2]});
  }
  return out;
}

bool overlaps(const std::vector<Placement>& ps, const Catalog& catalog) {
  std::set<Cell> seen;
  for (const auto& p : ps) {
    for (const auto& c : cells(p, catalog)) {
      if (!seen.insert(c).second) {
        return true;
      }
    }
  }
  return false;
}

bool connected(const std::vector<Placement>& ps, const Catalog& catalog, bool ground_anchoring) {
  if (ps.empty()) {
    return true;
  }
  // Flood fill from the table (anchored) or from the first grounded part.
  std::map<int, std::vector<int>> next;
  for (const auto& [a, b] : adjacency(ps, catalog)) {
    next[a].push_back(b);
    next[b].push_back(a);
  }
  std::vector<int> frontier;
  for (const auto& p : ps) {
    if (p.cell.z() == 0) {
      frontier.push_back(p.instance_id);
      if (!ground_anchoring) {
        break;
      }
    }
  }
  if (frontier.empty()) {
    return false;
  }
  std::set<int> reached(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    const int id = frontier.back();
    frontier.pop_back();
    for (int n : next[id]) {
      if (reached.insert(n).second) {
        frontier.push_back(n);
      }
    }
  }
  return reached.size() == ps.size();
}

int height(const std::vector<Placement>& ps, const Catalog& catalog) {
  int h = 0;
  for (const auto& p : ps) {
    for (const auto& c : cells(p, catalog)) {
      h = std::max(h, c[2] + 1);
    }
  }
  return h;
}

bool prefixes_connected(const std::vector<Placement>& order, const Catalog& catalog) {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  int pieces = 0;
  std::vector<Placement> built;
  for (const auto& p : order) {
    parent[p.instance_id] = p.instance_id;
    ++pieces;
    for (const auto& q : built) {
      if (adjacency({p, q}, catalog).empty()) {
        continue;
      }
      const int a = find(p.instance_id);
      const int b = find(q.instance_id);
      if (a != b) {
        parent[a] = b;
        --pieces;
      }
    }
    built.push_back(p);
    if (pieces != 1) {
      return false;
    }
  }
  return true;
}

bool addition_legal(const std::vector<Placement>& ps, const Placement& p, const Catalog& catalog,
                    const ae::LatticeBounds& bounds, bool ground_anchoring) {
  return legal_against(index_structure(ps, catalog), ps.empty(), p, catalog, bounds,
                       ground_anchoring);
}

std::vector<Placement> legal_additions(const std::vector<Placement>& ps, int type_id,
                                       const Catalog& catalog, const ae::LatticeBounds& bounds,
                                       bool ground_anchoring) {
  const Structure s = index_structure(ps, catalog);
  int next_id = 0;
  for (const auto& p : ps) {
    next_id = std::max(next_id, p.instance_id + 1);
  }
  std::vector<Placement> out;
  std::set<std::string> seen;
  for (int z = bounds.min.z(); z < bounds.max.z(); ++z) {
    for (int y = bounds.min.y(); y < bounds.max.y(); ++y) {
      for (int x = bounds.min.x(); x < bounds.max.x(); ++x) {
        for (int q = 0; q < 4; ++q) {
          const Placement p{next_id, type_id, Eigen::Vector3i(x, y, z), q};
          if (legal_against(s, ps.empty(), p, catalog, bounds, ground_anchoring) &&
              seen.insert(pose_signature(p, catalog)).second) {
            out.push_back(p);
          }
        }
      }
    }
  }
  return out;
}

bool goals_met(const std::vector<Placement>& ps, const ae::GoalSet& goals, const Catalog& catalog,
               bool ground_anchoring) {
  if (ps.empty() || static_cast<int>(ps.size()) > goals.max_components ||
      height(ps, catalog) < goals.target_height) {
    return false;
  }
  for (const auto& [type, n] : type_counts(ps)) {
    const auto it = goals.per_type_limits.find(type);
    if (it != goals.per_type_limits.end() && n > it->second) {
      return false;
    }
  }
  return connected(ps, catalog, ground_anchoring);
}

std::optional<int> optimal_edit_cost(const ae::AssemblyState& current, const ae::GoalSet& goals,
                                     const Catalog& catalog, const ae::LatticeBounds& bounds,
                                     bool ground_anchoring, int w_remove, int w_add, int max_cost) {
  std::map<int, int> stock = current.inventory.counts;
  for (const auto& p : current.placements) {
    stock[p.type_id] += 1;
  }
  auto limit = [&](int type) {
    const auto it = goals.per_type_limits.find(type);
    return it == goals.per_type_limits.end() ? std::numeric_limits<int>::max() : it->second;
  };

  using Key = std::vector<std::string>;
  std::map<Key, int> best;
  std::vector<std::vector<Placement>> states;
  using Entry = std::pair<int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  states.push_back(current.placements);
  best[structure_signature(current.placements, catalog)] = 0;
  open.push({0, 0});
  std::set<Key> done;
  // Cheapest goal generated so far; nothing popped later can beat it.
  int best_goal = goals_met(current.placements, goals, catalog, ground_anchoring)
                      ? 0
                      : std::numeric_limits<int>::max();

  while (!open.empty()) {
    const auto [cost, index] = open.top();
    open.pop();
    if (cost >= best_goal) {
      return best_goal;
    }
    if (cost > max_cost) {
      return std::nullopt;
    }
    const std::vector<Placement> ps = states[index];
    const Key key = structure_signature(ps, catalog);
    if (!done.insert(key).second) {
      continue;
    }
    auto relax = [&](std::vector<Placement> next, int c) {
      Key k = structure_signature(next, catalog);
      const auto it = best.find(k);
      if (it != best.end() && it->second <= c) {
        return;
      }
      if (goals_met(next, goals, catalog, ground_anchoring)) {
        best_goal = std::min(best_goal, c);
      }
      best[k] = c;
      states.push_back(std::move(next));
      open.push({c, states.size() - 1});
    };
    for (std::size_t i = 0; i < ps.size(); ++i) {
      std::vector<Placement> next = ps;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
      if (connected(next, catalog, ground_anchoring)) {
        relax(std::move(next), cost + w_remove);
      }
    }
    if (static_cast<int>(ps.size()) >= goals.max_components) {
      continue;
    }
    const auto counts = type_counts(ps);
    for (const auto& [type, total] : stock) {
      const auto it = counts.find(type);
      const int used = it == counts.end() ? 0 : it->second;
      if (used >= total || used >= limit(type)) {
        continue;
      }
      for (const auto& p : legal_additions(ps, type, catalog, bounds, ground_anchoring)) {
        std::vector<Placement> next = ps;
        next.push_back(p);
        relax(std::move(next), cost + w_add);
      }
    }
  }
  return best_goal <= max_cost ? std::optional<int>(best_goal) : std::nullopt;
}

std::string check_candidate(const ae::AssemblyState& current, const ae::CandidatePlan& candidate,
                            const ae::GoalSet& goals, const Catalog& catalog,
                            const ae::LatticeBounds& bounds, bool ground_anchoring, int w_remove,
                            int w_add) {
  const auto& final_ps = candidate.final_state.placements;
  if (overlaps(final_ps, catalog)) {
    return "final structure overlaps";
  }
  for (const auto& p : final_ps) {
    for (const auto& c : cells(p, catalog)) {
      if (!in_bounds(c, bounds)) {
        return "final structure leaves the bounds";
      }
    }
  }
  if (!goals_met(final_ps, goals, catalog, ground_anchoring)) {
    return "final structure misses the goals";
  }
  if (!candidate.goal_satisfied) {
    return "goal flag not set";
  }
  std::map<int, int> stock = current.inventory.counts;
  for (const auto& p : current.placements) {
    stock[p.type_id] += 1;
  }
  for (const auto& [type, n] : type_counts(final_ps)) {
    if (n > stock[type]) {
      return "inventory exceeded for type " + std::to_string(type);
    }
  }
  std::vector<std::array<int, 4>> edges;
  for (const auto& e : candidate.final_state.edges) {
    edges.push_back({e.instance_a, e.port_a, e.instance_b, e.port_b});
  }
  std::sort(edges.begin(), edges.end());
  if (edges != port_joins(final_ps, catalog)) {
    return "final edges differ from the port scan";
  }

  // Walk the continuation from the current structure.
  std::vector<Placement> ps = current.placements;
  int removes = 0;
  int adds = 0;
  for (const auto& step : candidate.continuation.steps) {
    if (step.action == ae::StepAction::Remove) {
      const auto it = std::find_if(ps.begin(), ps.end(), [&](const Placement& p) {
        return p.instance_id == step.instance_id;
      });
      if (it == ps.end()) {
        return "removal of a missing instance";
      }
      ps.erase(it);
      if (!connected(ps, catalog, ground_anchoring)) {
        return "removal disconnects the structure";
      }
      ++removes;
    } else {
      if (std::any_of(ps.begin(), ps.end(),
                      [&](const Placement& p) { return p.instance_id == step.instance_id; })) {
        return "duplicate instance id in continuation";
      }
      if (!addition_legal(ps, step.placement, catalog, bounds, ground_anchoring)) {
        return "illegal addition at step " + std::to_string(step.step_index);
      }
      const auto counts = type_counts(ps);
      const auto c = counts.find(step.type_id);
      if ((c == counts.end() ? 0 : c->second) + 1 > stock[step.type_id]) {
        return "continuation exceeds inventory";
      }
      ps.push_back(step.placement);
      ++adds;
    }
  }
  if (structure_signature(ps, catalog) != structure_signature(final_ps, catalog)) {
    return "continuation does not reach the final structure";
  }
  if (candidate.edit_cost != w_remove * removes + w_add * adds) {
    return "edit cost does not match the continuation";
  }
  if (candidate.edit_cost != w_remove * static_cast<int>(candidate.removals.size()) +
                                 w_add * static_cast<int>(candidate.additions.size())) {
    return "edit cost does not match the edit lists";
  }
  return {};
}

// ---- stability -------------------------------------------------------------

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

} // namespace

std::vector<Vec2> gift_wrap(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Vec2& a, const Vec2& b) { return std::tie(a.x(), a.y()) < std::tie(b.x(), b.y()); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  std::vector<Vec2> hull;
  std::size_t start = 0; // leftmost, lowest
  std::size_t p = start;
  do {
    hull.push_back(pts[p]);
    std::size_t q = (p + 1) % pts.size();
    for (std::size_t r = 0; r < pts.size(); ++r) {
      const double c = cross(pts[p], pts[q], pts[r]);
      // Turn clockwise of the current candidate, or further along the same line.
      if (c < 0.0 || (c == 0.0 && (pts[r] - pts[p]).squaredNorm() > (pts[q] - pts[p]).squaredNorm())) {
        q = r;
      }
    }
    p = q;
  } while (p != start && hull.size() <= pts.size());
  return hull;
}

bool in_convex(const std::vector<Vec2>& hull, const Vec2& p, double eps) {
  if (hull.size() < 3) {
    return false;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    if (cross(a, b, p) < -eps * (b - a).norm()) {
      return false;
    }
  }
  return true;
}

bool stability_verdict(const std::vector<ae::StabilityBlock>& blocks, double eps) {
  const std::size_t n = blocks.size();
  auto contact = [&](const ae::StabilityBlock& up, const ae::StabilityBlock& low) {
    if (std::abs(up.min.z() - low.max().z()) > 1e-9) {
      return false;
    }
    const double w = std::min(up.max().x(), low.max().x()) - std::max(up.min.x(), low.min.x());
    const double d = std::min(up.max().y(), low.max().y()) - std::max(up.min.y(), low.min.y());
    return w > 1e-9 && d > 1e-9;
  };
  auto touching = [&](std::size_t i, std::size_t j) {
    return contact(blocks[i], blocks[j]) || contact(blocks[j], blocks[i]);
  };

  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double level = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        level = std::min(level, blocks[i].min.z());
      }
    }
    auto above = [&](std::size_t i) { return blocks[i].min.z() >= level - 1e-9; };
    bool group = true;
    for (std::size_t i = 0; i < n && group; ++i) {
      if (!(mask & (1u << i))) {
        continue;
      }
      if (!above(i)) {
        group = false;
      }
      for (std::size_t j = 0; j < n && group; ++j) {
        if (!(mask & (1u << j)) && above(j) && touching(i, j)) {
          group = false; // not closed under contact
        }
      }
    }
    if (!group) {
      continue;
    }
    // Connected through contact within the subset.
    std::uint32_t reached = mask & (~mask + 1);
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(reached & (1u << i))) {
          continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
          if ((mask & (1u << j)) && !(reached & (1u << j)) && touching(i, j)) {
            reached |= 1u << j;
            grew = true;
          }
        }
      }
    }
    if (reached != mask) {
      continue;
    }

    double mass = 0.0;
    Vec2 moment = Vec2::Zero();
    std::vector<Vec2> support;
    auto rect = [&](double x0, double y0, double x1, double y1) {
      support.insert(support.end(), {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)});
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) {
        continue;
      }
      const auto& b = blocks[i];
      mass += b.mass;
      moment += b.mass * Vec2(b.min.x() + 0.5 * b.size.x(), b.min.y() + 0.5 * b.size.y());
      if (std::abs(b.min.z()) <= 1e-9) {
        rect(b.min.x(), b.min.y(), b.max().x(), b.max().y());
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!above(j) && contact(b, blocks[j])) {
          const auto& l = blocks[j];
          rect(std::max(b.min.x(), l.min.x()), std::max(b.min.y(), l.min.y()),
               std::min(b.max().x(), l.max().x()), std::min(b.max().y(), l.max().y()));
        }
      }
    }
    if (!in_convex(gift_wrap(support), moment / mass, eps)) {
      return false;
    }
  }
  return true;
}

// ---- twin ------------------------------------------------------------------

std::vector<int> best_assignment(const std::vector<Vec3>& tracks, const std::vector<Vec3>& detections,
                                 double gate) {
  std::vector<int> best(detections.size(), -1);
  int best_matched = -1;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<int> current(detections.size(), -1);
  std::vector<bool> used(tracks.size(), false);
  std::function<void(std::size_t, int, double)> search = [&](std::size_t d, int matched,
                                                             double total) {
    if (d == detections.size()) {
      if (matched > best_matched || (matched == best_matched && total < best_total)) {
        best = current;
        best_matched = matched;
        best_total = total;
      }
      return;
    }
    current[d] = -1;
    search(d + 1, matched, total);
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      const double dist = (tracks[t] - detections[d]).norm();
      if (used[t] || dist > gate) {
        continue;
      }
      used[t] = true;
      current[d] = static_cast<int>(t);
      search(d + 1, matched + 1, total + dist);
      used[t] = false;
      current[d] = -1;
    }
  };
  search(0, 0, 0.0);
  return best;
}

} // namespace oracle
