#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/rng.hpp"
#include "assembly_engine/sim.hpp"
#include "fixtures.hpp"

namespace {

using ae::Vec2;
using ae::Vec3;
using fixtures::at;

ae::Scenario scenario() {
  const auto c = fixtures::bricks();
  const auto model = ae::build_model({at(1, 6, 0, 0, 0), at(2, 1, 0, 0, 1), at(3, 2, 3, 0, 0)}, c);
  return fixtures::quiet_scenario(c, model, ae::PlanMode::Layer);
}

TEST(Rng, SameKeySameSequence) {
  ae::CounterRng a(1, 2, 3, 4), b(1, 2, 3, 4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, KeysAreIndependent) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 4; ++s)
    for (std::uint64_t st = 0; st < 4; ++st)
      for (std::uint64_t f = 0; f < 4; ++f)
        for (std::uint64_t p = 0; p < 4; ++p) firsts.insert(ae::CounterRng(s, st, f, p).next());
  EXPECT_EQ(firsts.size(), 256u);
}

TEST(Rng, SamplerMoments) {
  ae::CounterRng r(5, 1, 0, 0);
  const int n = 20000;
  double su = 0, sn = 0, sn2 = 0, sg = 0, sb = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    sg += r.gamma(2.5);
    const double b = r.beta(8.0, 2.0);
    ASSERT_GT(b, 0.0);
    ASSERT_LT(b, 1.0);
    sb += b;
  }
  EXPECT_NEAR(su / n, 0.5, 0.01);
  EXPECT_NEAR(sn / n, 0.0, 0.03);
  EXPECT_NEAR(sn2 / n, 1.0, 0.04);
  EXPECT_NEAR(sg / n, 2.5, 0.05);
  EXPECT_NEAR(sb / n, 0.8, 0.01);
}

TEST(Sim, EveryPartDetectedWithoutNoise) {
  const auto sc = scenario();
  const auto [cam, dets] = ae::render_detections(sc, 0);
  ASSERT_EQ(dets.size(), sc.layout.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    EXPECT_EQ(dets[i].class_id, sc.layout[i].type_id);
    EXPECT_EQ(dets[i].frame, 0);
  }
  EXPECT_EQ(ae::render_detections(sc, 0, {0, 1}).second.size(), sc.layout.size() - 2);
}

TEST(Sim, CertainMissDetectsNothing) {
  auto sc = scenario();
  sc.noise.miss_prob = 1.0;
  for (int f = 0; f < 20; ++f) EXPECT_TRUE(ae::render_detections(sc, f).second.empty());
}

TEST(Sim, CertainConfusionChangesEveryClass) {
  auto sc = scenario();
  sc.noise.class_confusion_prob = 1.0;
  const auto dets = ae::render_detections(sc, 3).second;
  ASSERT_EQ(dets.size(), sc.layout.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    EXPECT_NE(dets[i].class_id, sc.layout[i].type_id);
    EXPECT_TRUE(sc.catalog.has_type(dets[i].class_id));
  }
}

// The bbox is centred on the projected base centre, so back-projecting the
// bbox centre recovers the part position on the table.
TEST(Sim, ZeroNoiseRoundTrip) {
  const auto sc = scenario();
  for (int f : {0, 100, 399}) {
    const auto [cam, dets] = ae::render_detections(sc, f);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const Vec2 c = 0.5 * (dets[i].bbox.min + dets[i].bbox.max);
      const Vec3 hit = ae::intersect_plane(ae::pixel_ray(cam, c), sc.plane);
      Vec3 base = sc.layout[i].box.center;
      base.z() -= sc.layout[i].box.half_extents.z();
      EXPECT_LT((hit - base).norm(), 1e-6);
    }
  }
}

TEST(Sim, JitterHasRequestedSpread) {
  auto clean = scenario();
  const auto proto = clean.layout;
  clean.layout.clear();
  for (int k = 0; k < 25; ++k) clean.layout.push_back(proto[static_cast<std::size_t>(k) % proto.size()]);
  auto noisy = clean;
  noisy.noise.jitter_sigma = 3.0;
  double s = 0.0, s2 = 0.0;
  int n = 0;
  for (int f = 0; f < 100; ++f) {
    const auto a = ae::render_detections(clean, f).second;
    const auto b = ae::render_detections(noisy, f).second;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (const double d : {b[i].bbox.min.x() - a[i].bbox.min.x(), b[i].bbox.min.y() - a[i].bbox.min.y(),
                             b[i].bbox.max.x() - a[i].bbox.max.x(), b[i].bbox.max.y() - a[i].bbox.max.y()}) {
        s += d;
        s2 += d * d;
        ++n;
      }
    }
  }
  ASSERT_GE(n, 10000);
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_NEAR(sd, 3.0, 0.05 * 3.0);
  EXPECT_NEAR(mean, 0.0, 0.1);
}

TEST(Sim, NoiseSettingsDoNotShiftOtherDraws) {
  auto a = scenario();
  auto b = a;
  b.noise.class_confusion_prob = 0.0;
  a.noise.class_confusion_prob = 0.5;
  a.noise.jitter_sigma = b.noise.jitter_sigma = 2.0;
  const auto da = ae::render_detections(a, 7).second;
  const auto db = ae::render_detections(b, 7).second;
  ASSERT_EQ(da.size(), db.size());
  for (std::size_t i = 0; i < da.size(); ++i) {
    EXPECT_EQ(da[i].bbox.min, db[i].bbox.min);
    EXPECT_EQ(da[i].confidence, db[i].confidence);
  }
}

TEST(Sim, CameraRange) {
  const auto sc = scenario();
  const int last = sc.last_frame();
  EXPECT_EQ(last, sc.camera.back().frame);
  EXPECT_NO_THROW(ae::camera_at(sc, last));
  try {
    ae::camera_at(sc, last + 1);
    FAIL();
  } catch (const ae::Error& e) {
    EXPECT_EQ(e.code(), ae::ErrorCode::FrameOutOfRange);
  }
}

TEST(Sim, CameraInterpolates) {
  auto sc = scenario();
  auto far = sc.camera.back();
  far.frame += 1;
  far.pose.position += Vec3(0.2, 0.0, 0.0);
  sc.camera.push_back(far);
  const auto mid = ae::camera_at(sc, far.frame - 0.5);
  EXPECT_NEAR((mid.position - (sc.camera[sc.camera.size() - 2].pose.position + Vec3(0.1, 0, 0))).norm(),
              0.0, 1e-12);
}

TEST(Sim, HandInterpolation) {
  std::vector<ae::HandKeyframe> keys{{10, Vec3(0, 0, 0), ae::HandSide::Right, ""},
                                     {20, Vec3(1, 2, 0), ae::HandSide::Left, "pick_correct"}};
  EXPECT_EQ(ae::interpolate_hand(keys, 0).position, Vec3(0, 0, 0));
  EXPECT_NEAR((ae::interpolate_hand(keys, 15).position - Vec3(0.5, 1, 0)).norm(), 0.0, 1e-12);
  EXPECT_EQ(ae::interpolate_hand(keys, 99).position, Vec3(1, 2, 0));
  EXPECT_EQ(ae::interpolate_hand(keys, 20).hand, ae::HandSide::Left);

  auto sc = scenario();
  sc.hand_script = keys;
  EXPECT_FALSE(ae::scripted_hand(sc, 9).has_value());
  EXPECT_EQ(ae::scripted_hand(sc, 12)->frame, 12);
}

TEST(Sim, MissingScript) {
  auto sc = scenario();
  sc.hand_script.reset();
  try {
    ae::scripted_hand(sc, 0);
    FAIL();
  } catch (const ae::Error& e) {
    EXPECT_EQ(e.code(), ae::ErrorCode::NoScript);
  }
  EXPECT_THROW(ae::interpolate_hand({}, 0), ae::Error);
}

TEST(Sim, NoiseValidation) {
  ae::NoiseParams p;
  EXPECT_NO_THROW(p.validate());
  p.miss_prob = 1.5;
  EXPECT_THROW(p.validate(), ae::Error);
  p = {};
  p.confidence_b = 0.0;
  EXPECT_THROW(p.validate(), ae::Error);
}

} // namespace
