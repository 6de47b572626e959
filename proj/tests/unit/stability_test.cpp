#include <gtest/gtest.h>

#include <cmath>

#include "assembly_engine/rng.hpp"
#include "assembly_engine/stability.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using ae::StabilityBlock;
using ae::Vec2;
using ae::Vec3;

StabilityBlock block(int id, Vec3 min, Vec3 size, double mass = 1.0) {
  return StabilityBlock{id, min, size, mass};
}

ae::StabilityOptions opts() {
  ae::StabilityOptions o;
  o.margin_scale = 1.0;
  return o;
}

TEST(Stability, EmptyIsStable) {
  const auto r = ae::analyze_blocks({}, {}, opts());
  EXPECT_TRUE(r.stable);
  EXPECT_FALSE(r.worst_cut.has_value());
}

TEST(Stability, SingleBlockMarginIsHalfNarrowSide) {
  const auto r = ae::analyze_blocks({block(3, Vec3(1, 1, 0), Vec3(2, 1, 1))}, {}, opts());
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(r.per_placement_margin.at(3), 0.5, 1e-12);
  EXPECT_NEAR(r.score, 0.5, 1e-12);
  ASSERT_TRUE(r.worst_cut.has_value());
  EXPECT_EQ(r.worst_cut->ids, std::set<int>{3});
}

TEST(Stability, OverhangPastHalfTips) {
  const auto base = block(1, Vec3(0, 0, 0), Vec3(1, 1, 1));
  const auto over = ae::analyze_blocks({base, block(2, Vec3(0.6, 0, 1), Vec3(1, 1, 1))}, {}, opts());
  EXPECT_FALSE(over.stable);
  EXPECT_EQ(over.score, 0.0);
  EXPECT_EQ(over.worst_cut->ids, std::set<int>{2});
  EXPECT_NEAR(over.worst_cut->margin, -0.1, 1e-12);
  const auto ok = ae::analyze_blocks({base, block(2, Vec3(0.4, 0, 1), Vec3(1, 1, 1))}, {}, opts());
  EXPECT_TRUE(ok.stable);
  EXPECT_NEAR(ok.per_placement_margin.at(2), 0.1, 1e-12);
}

TEST(Stability, RigidJointsCarryOverhang) {
  const std::vector blocks{block(1, Vec3(0, 0, 0), Vec3(1, 1, 1)), block(2, Vec3(0.6, 0, 1), Vec3(1, 1, 1))};
  auto o = opts();
  EXPECT_TRUE(ae::analyze_blocks(blocks, {{1, 2}}, o).stable == false);
  o.rigid_joints = true;
  const auto r = ae::analyze_blocks(blocks, {{1, 2}}, o);
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(r.worst_cut->margin, 0.2, 1e-12);
}

TEST(Stability, FloatingBlockUnsupported) {
  const auto r = ae::analyze_blocks({block(1, Vec3(0, 0, 1), Vec3(1, 1, 1))}, {}, opts());
  EXPECT_FALSE(r.stable);
  EXPECT_TRUE(std::isinf(r.worst_cut->margin));
  EXPECT_TRUE(ae::to_json(r)["worst_cut"]["margin"].is_null());
}

TEST(Stability, BridgeSpansTwoPillars) {
  const std::vector blocks{block(1, Vec3(0, 0, 0), Vec3(1, 1, 1)), block(2, Vec3(3, 0, 0), Vec3(1, 1, 1)),
                           block(3, Vec3(0, 0, 1), Vec3(4, 1, 1))};
  EXPECT_TRUE(ae::analyze_blocks(blocks, {}, opts()).stable);
  EXPECT_TRUE(oracle::stability_verdict(blocks));
}

TEST(Stability, HullMatchesGiftWrap) {
  for (int trial = 0; trial < 300; ++trial) {
    ae::CounterRng rng(4, ae::streams::kGenerator, static_cast<std::uint64_t>(trial), 0);
    std::vector<Vec2> pts;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(0.5 * static_cast<double>(rng.below(8)), 0.5 * static_cast<double>(rng.below(8)));
    }
    const auto hull = ae::convex_hull(pts);
    auto ref = oracle::gift_wrap(pts);
    ASSERT_EQ(hull.size(), ref.size()) << trial;
    if (hull.size() >= 3) {
      // Same cyclic sequence.
      std::size_t shift = 0;
      while (shift < ref.size() && ref[shift] != hull[0]) ++shift;
      ASSERT_LT(shift, ref.size());
      for (std::size_t i = 0; i < hull.size(); ++i) {
        EXPECT_EQ(hull[i], ref[(i + shift) % ref.size()]);
      }
      for (int q = 0; q < 20; ++q) {
        const Vec2 p(4.0 * rng.uniform(), 4.0 * rng.uniform());
        const double d = ae::signed_distance_to_hull(hull, p);
        if (std::abs(d) > 1e-9) {
          EXPECT_EQ(d > 0.0, oracle::in_convex(ref, p, 0.0));
        }
      }
    }
  }
}

// Verdicts agree with subset enumeration and survive rigid motions of the table plane.
TEST(Stability, RandomStacksMatchOracleAndAreInvariant) {
  int unstable = 0;
  for (int trial = 0; trial < 300; ++trial) {
    ae::CounterRng rng(21, ae::streams::kGenerator, static_cast<std::uint64_t>(trial), 0);
    const auto blocks = fixtures::random_stack(rng, 1 + static_cast<int>(rng.below(7)));
    const auto r = ae::analyze_blocks(blocks, {}, opts());
    ASSERT_EQ(r.stable, oracle::stability_verdict(blocks)) << trial;
    unstable += r.stable ? 0 : 1;

    auto shifted = blocks;
    auto mirrored = blocks;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      shifted[i].min += Vec3(3.7, -2.1, 0.0);
      mirrored[i].min.x() = -blocks[i].max().x();
    }
    const auto rs = ae::analyze_blocks(shifted, {}, opts());
    const auto rm = ae::analyze_blocks(mirrored, {}, opts());
    EXPECT_EQ(rs.stable, r.stable);
    EXPECT_EQ(rm.stable, r.stable);
    for (const auto& [id, m] : r.per_placement_margin) {
      if (std::isfinite(m)) {
        EXPECT_NEAR(rs.per_placement_margin.at(id), m, 1e-9);
        EXPECT_NEAR(rm.per_placement_margin.at(id), m, 1e-9);
      }
    }
  }
  EXPECT_GT(unstable, 10);
  EXPECT_LT(unstable, 290);
}

TEST(Stability, AnalyzeUsesLatticeBlocks) {
  const auto c = fixtures::bricks();
  const auto state = ae::build_model({fixtures::at(1, 8, 0, 0, 0), fixtures::at(2, 1, 0, 0, 1)}, c);
  const auto blocks = ae::blocks_from_state(state, c, c.cell_size());
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_NEAR(blocks[0].size.y(), 0.16, 1e-12);
  const auto r = ae::analyze(state, c);
  EXPECT_TRUE(r.stable);
  EXPECT_NEAR(ae::margin_scale(c), 0.12, 1e-12);
  EXPECT_NEAR(r.score, r.worst_cut->margin / 0.12, 1e-12);
}

} // namespace
