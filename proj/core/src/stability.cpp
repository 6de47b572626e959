#include "assembly_engine/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ae {

namespace {

constexpr double kEps = 1e-9;

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

struct Rect {
  Vec2 lo;
  Vec2 hi;
};

// Horizontal overlap of two blocks, if it has positive area.
std::optional<Rect> overlap(const StabilityBlock& a, const StabilityBlock& b) {
  const Vec2 lo(std::max(a.min.x(), b.min.x()), std::max(a.min.y(), b.min.y()));
  const Vec2 hi(std::min(a.max().x(), b.max().x()), std::min(a.max().y(), b.max().y()));
  if (hi.x() - lo.x() <= kEps || hi.y() - lo.y() <= kEps) {
    return std::nullopt;
  }
  return Rect{lo, hi};
}

// True when `upper` rests on `lower`.
bool rests_on(const StabilityBlock& upper, const StabilityBlock& lower) {
  return std::abs(upper.min.z() - lower.max().z()) <= kEps && overlap(upper, lower).has_value();
}

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
};

} // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    return pts;
  }
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) {
      --k;
    }
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) {
      --k;
    }
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double signed_distance_to_hull(const std::vector<Vec2>& hull, const Vec2& p) {
  if (hull.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  if (hull.size() == 1) {
    return -(p - hull[0]).norm();
  }
  double nearest = std::numeric_limits<double>::infinity();
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    nearest = std::min(nearest, segment_distance(p, a, b));
    if (cross(a, b, p) < 0.0) {
      inside = false;
    }
  }
  return inside ? nearest : -nearest;
}

StabilityReport analyze_blocks(const std::vector<StabilityBlock>& blocks,
                               const std::vector<std::pair<int, int>>& joints,
                               const StabilityOptions& options) {
  StabilityReport report;
  if (blocks.empty()) {
    return report;
  }

  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    index[blocks[i].id] = i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> joint_idx;
  if (options.rigid_joints) {
    for (const auto& [a, b] : joints) {
      const auto ia = index.find(a);
      const auto ib = index.find(b);
      if (ia != index.end() && ib != index.end()) {
        joint_idx.emplace_back(ia->second, ib->second);
      }
    }
  }

  std::vector<double> levels;
  for (const auto& b : blocks) {
    levels.push_back(b.min.z());
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) <= kEps; }),
               levels.end());

  // Margin of the group containing each block, per evaluated level.
  std::vector<std::map<double, double>> block_margin(blocks.size());
  double worst = std::numeric_limits<double>::infinity();

  for (const double level : levels) {
    std::vector<bool> above(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      above[i] = blocks[i].min.z() >= level - kEps;
    }
    Dsu dsu(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (i != j && above[i] && above[j] && rests_on(blocks[i], blocks[j])) {
          dsu.unite(i, j);
        }
      }
    }
    for (const auto& [a, b] : joint_idx) {
      if (above[a] && above[b]) {
        dsu.unite(a, b);
      }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (above[i]) {
        groups[dsu.find(i)].push_back(i);
      }
    }

    for (const auto& [root, members] : groups) {
      std::vector<bool> in_group(blocks.size());
      for (std::size_t m : members) {
        in_group[m] = true;
      }
      // Only groups that touch the cut plane belong to this level.
      const bool at_level = std::any_of(members.begin(), members.end(), [&](std::size_t m) {
        return std::abs(blocks[m].min.z() - level) <= kEps;
      });
      if (!at_level) {
        continue;
      }
      const bool glued = std::any_of(joint_idx.begin(), joint_idx.end(), [&](const auto& j) {
        return (in_group[j.first] && !above[j.second]) || (in_group[j.second] && !above[j.first]);
      });
      if (glued) {
        continue;
      }

      double mass = 0.0;
      Vec2 moment = Vec2::Zero();
      std::vector<Vec2> corners;
      for (std::size_t m : members) {
        const auto& b = blocks[m];
        mass += b.mass;
        moment += b.mass * b.center().head<2>();
        if (std::abs(b.min.z()) <= kEps) {
          corners.emplace_back(b.min.x(), b.min.y());
          corners.emplace_back(b.max().x(), b.min.y());
          corners.emplace_back(b.max().x(), b.max().y());
          corners.emplace_back(b.min.x(), b.max().y());
        }
        for (std::size_t o = 0; o < blocks.size(); ++o) {
          if (above[o] || !rests_on(b, blocks[o])) {
            continue;
          }
          const Rect r = *overlap(b, blocks[o]);
          corners.emplace_back(r.lo.x(), r.lo.y());
          corners.emplace_back(r.hi.x(), r.lo.y());
          corners.emplace_back(r.hi.x(), r.hi.y());
          corners.emplace_back(r.lo.x(), r.hi.y());
        }
      }
      const Vec2 com = moment / mass;
      const double margin = signed_distance_to_hull(convex_hull(corners), com);

      for (std::size_t m : members) {
        block_margin[m][level] = margin;
      }
      if (margin < worst) {
        worst = margin;
        Cut cut;
        for (std::size_t m : members) {
          cut.ids.insert(blocks[m].id);
        }
        cut.margin = margin;
        report.worst_cut = std::move(cut);
      }
    }
  }

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    // The cut at the block's own bottom, or the nearest evaluated cut below it.
    const auto& by_level = block_margin[i];
    auto it = by_level.upper_bound(blocks[i].min.z() + kEps);
    if (it != by_level.begin()) {
      --it;
      report.per_placement_margin[blocks[i].id] = it->second;
    }
  }

  report.stable = worst >= -options.tolerance;
  report.score = report.stable ? std::clamp(worst / options.margin_scale, 0.0, 1.0) : 0.0;
  return report;
}

std::vector<StabilityBlock> blocks_from_state(const AssemblyState& state, const Catalog& catalog,
                                              double cell_size) {
  std::vector<StabilityBlock> out;
  out.reserve(state.placements.size());
  for (const auto& p : state.placements) {
    const auto& type = catalog.type(p.type_id);
    StabilityBlock b;
    b.id = p.instance_id;
    b.min = p.cell.cast<double>() * cell_size;
    b.size = rotated_footprint(type, p.quarter_turns).cast<double>() * cell_size;
    b.mass = type.mass;
    out.push_back(b);
  }
  return out;
}

double margin_scale(const Catalog& catalog) {
  return 0.5 * catalog.max_footprint_dim() * catalog.cell_size();
}

StabilityReport analyze(const AssemblyState& state, const Catalog& catalog, bool rigid_joints) {
  std::vector<std::pair<int, int>> joints;
  for (const auto& e : state.edges) {
    joints.emplace_back(e.instance_a, e.instance_b);
  }
  StabilityOptions options;
  options.rigid_joints = rigid_joints;
  options.margin_scale = margin_scale(catalog);
  return analyze_blocks(blocks_from_state(state, catalog, catalog.cell_size()), joints, options);
}

nlohmann::json to_json(const StabilityReport& r) {
  auto finite = [](double v) -> nlohmann::json {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, m] : r.per_placement_margin) {
    per[std::to_string(id)] = finite(m);
  }
  nlohmann::json j{{"stable", r.stable}, {"score", r.score}, {"per_placement_margin", per}};
  if (r.worst_cut) {
    j["worst_cut"] = {{"ids", r.worst_cut->ids}, {"margin", finite(r.worst_cut->margin)}};
  } else {
    j["worst_cut"] = nullptr;
  }
  return j;
}

} // namespace ae
