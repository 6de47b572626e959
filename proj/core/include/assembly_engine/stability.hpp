#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "assembly_engine/assembly.hpp"

namespace ae {

/// Axis-aligned solid with uniform density, in metres.
struct StabilityBlock {
  int id = 0;
  Vec3 min = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  double mass = 1.0;

  Vec3 max() const { return min + size; }
  Vec3 center() const { return min + 0.5 * size; }
};

struct Cut {
  std::set<int> ids;
  double margin = 0.0;
};

struct StabilityReport {
  bool stable = true;
  double score = 1.0;
  std::optional<Cut> worst_cut; // empty for an empty structure
  std::map<int, double> per_placement_margin;
};

struct StabilityOptions {
  bool rigid_joints = false;
  double margin_scale = 0.02;
  double tolerance = 1e-9; // margins above -tolerance count as supported
};

/// Tipping check over every horizontal cut. A cut level is the bottom height of
/// some block; the parts at or above it are grouped by vertical contact (and by
/// joints when `rigid_joints`) and each group's centre of mass is tested
/// against the convex hull of the contacts carrying it from below. Margins are
/// signed distances in the horizontal plane, positive inside the hull; an
/// unsupported group gets -infinity. With rigid joints a group jointed to a
/// part below the cut cannot tip there and is skipped.
/// `joints` lists block id pairs and is ignored unless `rigid_joints`.
StabilityReport analyze_blocks(const std::vector<StabilityBlock>& blocks,
                               const std::vector<std::pair<int, int>>& joints,
                               const StabilityOptions& options);

std::vector<StabilityBlock> blocks_from_state(const AssemblyState& state, const Catalog& catalog,
                                              double cell_size);

/// Half the largest footprint dimension in the catalogue, in metres.
double margin_scale(const Catalog& catalog);

StabilityReport analyze(const AssemblyState& state, const Catalog& catalog,
                        bool rigid_joints = false);

/// Signed distance from `p` to the boundary of a convex polygon given in
/// counter-clockwise order; positive inside.
double signed_distance_to_hull(const std::vector<Vec2>& hull, const Vec2& p);

/// Counter-clockwise convex hull without collinear points.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

nlohmann::json to_json(const StabilityReport& r);

} // namespace ae
