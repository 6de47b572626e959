#include "assembly_engine/planner.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_set>

#include "assembly_engine/errors.hpp"

namespace ae {

std::string to_string(StepStatus s) {
  switch (s) {
  case StepStatus::Pending: return "pending";
  case StepStatus::Active: return "active";
  case StepStatus::Done: return "done";
  case StepStatus::Deviated: return "deviated";
  }
  return "?";
}

std::string to_string(StepAction a) { return a == StepAction::Place ? "place" : "remove"; }

std::string to_string(PlanMode m) { return m == PlanMode::Layer ? "layer" : "graph"; }

PlanMode plan_mode_from_string(const std::string& s) {
  if (s == "layer") return PlanMode::Layer;
  if (s == "graph") return PlanMode::Graph;
  fail(ErrorCode::MalformedDocument, "mode must be 'layer' or 'graph', got '" + s + "'");
}

std::optional<std::size_t> Plan::first_open() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].status == StepStatus::Pending || steps[i].status == StepStatus::Active) {
      return i;
    }
  }
  return std::nullopt;
}

namespace {

PlanStep make_step(int index, const Placement& p, const Catalog& catalog, const LatticeFrame& frame) {
  PlanStep s;
  s.step_index = index;
  s.instance_id = p.instance_id;
  s.type_id = p.type_id;
  s.placement = p;
  s.place_region = frame.box(p, catalog);
  return s;
}

void check_overlap_free(const AssemblyState& model, const Catalog& catalog) {
  std::set<std::tuple<int, int, int>> occ;
  for (const auto& p : model.placements) {
    for (const auto& c : occupied_cells(p, catalog)) {
      if (!occ.emplace(c.x(), c.y(), c.z()).second) {
        fail(ErrorCode::OverlappingPlacements, "instance " + std::to_string(p.instance_id));
      }
    }
  }
}

// Greedy max-engagement expansion from `seeds`; returns the instance order of
// everything outside the seed set.
std::vector<int> greedy_order(const AssemblyState& model, const std::set<int>& seeds) {
  std::map<int, std::vector<int>> adjacency;
  for (const auto& p : model.placements) {
    adjacency[p.instance_id];
  }
  for (const auto& e : model.edges) {
    adjacency[e.instance_a].push_back(e.instance_b);
    adjacency[e.instance_b].push_back(e.instance_a);
  }

  std::set<int> done = seeds;
  std::map<int, int> engaged; // frontier instance -> edges into `done`
  for (int s : seeds) {
    for (int n : adjacency[s]) {
      if (!done.count(n)) {
        engaged[n] += 1;
      }
    }
  }

  std::vector<int> order;
  while (!engaged.empty()) {
    // std::map iterates ids ascending, so the first maximum is the lowest id.
    auto best = engaged.begin();
    for (auto it = engaged.begin(); it != engaged.end(); ++it) {
      if (it->second > best->second) {
        best = it;
      }
    }
    const int next = best->first;
    engaged.erase(best);
    done.insert(next);
    order.push_back(next);
    for (int n : adjacency[next]) {
      if (!done.count(n)) {
        engaged[n] += 1;
      }
    }
  }

  if (done.size() != adjacency.size()) {
    fail(ErrorCode::DisconnectedModel,
         std::to_string(adjacency.size() - done.size()) + " instance(s) unreachable");
  }
  return order;
}

} // namespace

Plan sequence_layered(const AssemblyState& model, const Catalog& catalog, const LatticeFrame& frame) {
  if (model.empty()) {
    fail(ErrorCode::EmptyModel);
  }
  check_overlap_free(model, catalog);

  std::vector<Placement> sorted = model.placements;
  std::sort(sorted.begin(), sorted.end(), [](const Placement& a, const Placement& b) {
    return std::make_tuple(a.cell.z(), a.cell.y(), a.cell.x(), a.instance_id) <
           std::make_tuple(b.cell.z(), b.cell.y(), b.cell.x(), b.instance_id);
  });

  Plan plan;
  plan.mode = PlanMode::Layer;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    plan.steps.push_back(make_step(static_cast<int>(i), sorted[i], catalog, frame));
  }
  return plan;
}

Plan sequence_graph(const AssemblyState& model, int base, const Catalog& catalog,
                    const LatticeFrame& frame) {
  if (model.empty()) {
    fail(ErrorCode::EmptyModel);
  }
  const Placement* base_placement = model.find(base);
  if (base_placement == nullptr) {
    fail(ErrorCode::UnknownBase, std::to_string(base));
  }
  check_overlap_free(model, catalog);

  Plan plan;
  plan.mode = PlanMode::Graph;
  plan.steps.push_back(make_step(0, *base_placement, catalog, frame));
  for (int id : greedy_order(model, {base})) {
    plan.steps.push_back(make_step(static_cast<int>(plan.steps.size()), *model.find(id), catalog, frame));
  }
  return plan;
}

Plan sequence_graph_from(const AssemblyState& model, const std::set<int>& built,
                         const Catalog& catalog, const LatticeFrame& frame) {
  if (built.empty()) {
    const auto base = default_base(model);
    if (!base) {
      fail(ErrorCode::EmptyModel);
    }
    return sequence_graph(model, *base, catalog, frame);
  }
  Plan plan;
  plan.mode = PlanMode::Graph;
  for (int id : greedy_order(model, built)) {
    plan.steps.push_back(make_step(static_cast<int>(plan.steps.size()), *model.find(id), catalog, frame));
  }
  return plan;
}

std::optional<int> default_base(const AssemblyState& model) {
  if (model.empty()) {
    return std::nullopt;
  }
  const auto it = std::min_element(model.placements.begin(), model.placements.end(),
                                   [](const Placement& a, const Placement& b) {
                                     return std::make_pair(a.cell.z(), a.instance_id) <
                                            std::make_pair(b.cell.z(), b.instance_id);
                                   });
  return it->instance_id;
}

PlanStep current_step(const Plan& plan, const TwinState& twin) {
  const auto idx = plan.first_open();
  if (!idx) {
    fail(ErrorCode::PlanComplete);
  }
  PlanStep step = plan.steps[*idx];
  step.pick_region.reset();
  step.pick_track_id.reset();
  step.part_not_visible = false;
  if (step.action == StepAction::Remove) {
    step.pick_region = step.place_region;
    step.status = StepStatus::Active;
    return step;
  }
  // Tracks are kept sorted by id, so the first match is the lowest id.
  for (const auto& t : twin.tracks) {
    if (t.class_id == step.type_id) {
      step.pick_region = t.box;
      step.pick_track_id = t.track_id;
      step.status = StepStatus::Active;
      return step;
    }
  }
  step.status = StepStatus::Pending;
  step.part_not_visible = true;
  return step;
}

nlohmann::json to_json(const PlanStep& s) {
  nlohmann::json j{{"step_index", s.step_index},
                   {"instance_id", s.instance_id},
                   {"type_id", s.type_id},
                   {"action", to_string(s.action)},
                   {"placement", to_json(s.placement)},
                   {"place_region", to_json(s.place_region)},
                   {"status", to_string(s.status)},
                   {"part_not_visible", s.part_not_visible}};
  j["pick_region"] = s.pick_region ? to_json(*s.pick_region) : nlohmann::json(nullptr);
  j["pick_track_id"] = s.pick_track_id ? nlohmann::json(*s.pick_track_id) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const Plan& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps) {
    steps.push_back(to_json(s));
  }
  return {{"mode", to_string(p.mode)}, {"steps", steps}};
}

} // namespace ae
