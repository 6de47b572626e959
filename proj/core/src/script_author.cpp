#include "assembly_engine/script_author.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "assembly_engine/errors.hpp"
#include "assembly_engine/session.hpp"

namespace ae {

namespace {

class Author {
public:
  Author(const Scenario& base, const AuthorOptions& options)
      : base_(base), options_(options) {
    Scenario padded = base;
    if (padded.last_frame() < options.max_frames) {
      padded.camera.push_back({options.max_frames, padded.camera.back().pose});
    }
    session_.load_scenario(padded);
    const double cell = base.lattice.cell_size;
    hover_ = base.lattice.origin.z() + base.bounds.max.z() * cell + options.clearance;
    const Vec3 home(base.lattice.origin.x() + 0.5 * (base.bounds.min.x() + base.bounds.max.x()) * cell,
                    base.lattice.origin.y() + 0.5 * (base.bounds.min.y() + base.bounds.max.y()) * cell,
                    hover_);
    keys_.push_back({0, home, HandSide::Right, ""});
    advance();
  }

  Session& session() { return session_; }
  int dwell() const { return session_.scenario().flags.dwell_frames; }

  void hold(int frames) { append(keys_.back().position, frames, ""); }

  /// Hover over `target`, descend onto it, dwell, and rise again.
  void visit(const Vec3& target, const std::string& intent) {
    const Vec3 here = keys_.back().position;
    if (here.z() < hover_) {
      move({here.x(), here.y(), hover_});
    }
    move({target.x(), target.y(), hover_});
    if (!intent.empty()) {
      append(keys_.back().position, 1, intent);
    }
    move(target);
    hold(dwell() + options_.hold_extra);
    move({target.x(), target.y(), hover_});
  }

  AuthoredScript finish() {
    hold(options_.tail_frames);
    AuthoredScript out;
    out.scenario = base_;
    out.scenario.hand_script = keys_;
    const int end = keys_.back().frame;
    if (end > out.scenario.last_frame()) {
      out.scenario.camera.push_back({end, out.scenario.camera.back().pose});
    }
    out.events = session_.interactions();
    out.plan_complete = session_.plan_complete();
    out.deviations = session_.counters().deviations;
    out.replans = session_.counters().replans;
    return out;
  }

private:
  void move(const Vec3& p) {
    const double d = (p - keys_.back().position).norm();
    append(p, std::max(1, static_cast<int>(std::ceil(d / options_.speed - 1e-9))), "");
  }

  void append(const Vec3& p, int frames, const std::string& intent) {
    keys_.push_back({keys_.back().frame + frames, p, HandSide::Right, intent});
    advance();
  }

  void advance() {
    while (session_.cursor() <= keys_.back().frame) {
      if (session_.cursor() >= options_.max_frames) {
        fail(ErrorCode::FrameOutOfRange, "script exceeds " + std::to_string(options_.max_frames) +
                                             " frames");
      }
      session_.hand(interpolate_hand(keys_, session_.cursor()).position, HandSide::Right);
      if (!session_.candidates().empty()) {
        const int n = static_cast<int>(session_.candidates().size());
        session_.select_candidate(std::min(session_.scenario().flags.auto_select, n - 1));
      }
    }
  }

  const Scenario& base_;
  AuthorOptions options_;
  Session session_;
  std::vector<HandKeyframe> keys_;
  double hover_ = 0.0;
};

std::optional<Vec3> deviant_region(Session& session, const PlanStep& step) {
  const auto& s = session.scenario();
  const auto regions =
      placement_regions(session.assembly(), s.catalog, step, session.monitor().held_type,
                        s.lattice, s.bounds, s.rules(), s.flags.region_margin);
  const auto target = std::find_if(regions.begin(), regions.end(),
                                   [](const PlacementRegion& r) { return r.is_target; });
  if (target == regions.end()) {
    return std::nullopt;
  }
  const PlacementRegion* best = nullptr;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& r : regions) {
    if (r.is_target || point_in_box(r.box.center, target->box)) {
      continue;
    }
    // Same layer first, then nearest.
    const double score = (r.placement.cell.z() != step.placement.cell.z() ? 1e3 : 0.0) +
                         (r.box.center - target->box.center).norm();
    if (score < best_score) {
      best_score = score;
      best = &r;
    }
  }
  return best ? std::optional<Vec3>(best->box.center) : std::nullopt;
}

} // namespace

AuthoredScript author_guided(const Scenario& base, std::optional<int> deviate_at,
                             const AuthorOptions& options) {
  Author a(base, options);
  Session& session = a.session();
  bool deviated = false;
  const int attempts = 8 * static_cast<int>(base.model.placements.size()) + 16;
  for (int i = 0; i < attempts && !session.plan_complete(); ++i) {
    const auto step = session.active_step();
    if (!step) {
      a.hold(1);
      continue;
    }
    if (step->action == StepAction::Remove) {
      a.visit(step->place_region.center, "pick_correct");
      continue;
    }
    if (session.monitor().phase != Phase::Holding) {
      if (!step->pick_region) {
        a.hold(a.dwell());
        continue;
      }
      a.visit(step->pick_region->center, "pick_correct");
      if (session.monitor().phase != Phase::Holding) {
        continue;
      }
    }
    Vec3 goal = step->place_region.center;
    std::string intent = "place_correct";
    if (deviate_at && !deviated && step->step_index == *deviate_at) {
      if (const auto region = deviant_region(session, *step)) {
        goal = *region;
        intent = "place_deviation";
        deviated = true;
      }
    }
    a.visit(goal, intent);
  }
  return a.finish();
}

AuthoredScript author_pick_trials(const Scenario& base, int trials, const AuthorOptions& options) {
  Author a(base, options);
  Session& session = a.session();
  auto step = session.active_step();
  for (int i = 0; i < 4 * a.dwell() && (!step || !step->pick_track_id); ++i) {
    a.hold(1);
    step = session.active_step();
  }
  if (!step || step->action != StepAction::Place) {
    fail(ErrorCode::ScenarioInvalid, "pick trials need a placement step with a visible part");
  }
  std::optional<Vec3> right;
  std::vector<Vec3> wrong;
  for (const auto& part : base.layout) {
    if (part.type_id == step->type_id) {
      right = right.value_or(part.box.center);
    } else {
      wrong.push_back(part.box.center);
    }
  }
  if (!right || wrong.empty()) {
    fail(ErrorCode::ScenarioInvalid, "pick trials need the requested part and at least one other");
  }
  for (int t = 0; t < trials; ++t) {
    const bool correct = t % 2 == 0;
    const Vec3 target = correct ? *right : wrong[static_cast<std::size_t>(t / 2) % wrong.size()];
    a.visit(target, correct ? "pick_correct" : "pick_wrong");
    for (int tries = 0; tries < 3 && session.monitor().phase == Phase::Holding; ++tries) {
      a.visit(target, tries == 0 ? "release" : "");
    }
  }
  return a.finish();
}

} // namespace ae
