#include "assembly_engine/replanner.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

#include "assembly_engine/errors.hpp"

namespace ae {

namespace {

std::int64_t pose_key(const Placement& p, const Catalog& catalog) {
  constexpr std::int64_t kBias = 1 << 11;
  std::int64_t k = p.type_id;
  k = (k << 12) | (p.cell.x() + kBias);
  k = (k << 12) | (p.cell.y() + kBias);
  k = (k << 12) | (p.cell.z() + kBias);
  return (k << 2) | canonical_quarter_turns(p, catalog);
}

std::uint64_t fnv1a(const std::vector<std::int64_t>& keys) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::int64_t k : keys) {
    auto u = static_cast<std::uint64_t>(k);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const { return fnv1a(v); }
};

struct Edit {
  bool remove = false;
  int instance_id = 0;
  Placement placement;
};

struct Node {
  AssemblyState state;
  int g = 0;
  int parent = -1;
  Edit edit;
};

struct QueueEntry {
  int f;
  std::uint64_t seq;
  int node;
  bool operator>(const QueueEntry& o) const { return std::tie(f, seq) > std::tie(o.f, o.seq); }
};

std::map<int, int> type_counts(const AssemblyState& s) {
  std::map<int, int> counts;
  for (const auto& p : s.placements) {
    counts[p.type_id] += 1;
  }
  return counts;
}

int limit_for(const GoalSet& goals, int type_id) {
  const auto it = goals.per_type_limits.find(type_id);
  return it == goals.per_type_limits.end() ? std::numeric_limits<int>::max() : it->second;
}

PlanStep step_for(int index, const Placement& p, StepAction action, const Catalog& catalog,
                  const LatticeFrame& frame) {
  PlanStep s;
  s.step_index = index;
  s.instance_id = p.instance_id;
  s.type_id = p.type_id;
  s.action = action;
  s.placement = p;
  s.place_region = frame.box(p, catalog);
  return s;
}

// Replays a continuation against `start`; false if any step is illegal.
bool continuation_legal(const AssemblyState& start, const Plan& plan, const Catalog& catalog,
                        const PlacementRules& rules) {
  AssemblyState s = start;
  try {
    for (const auto& step : plan.steps) {
      s = step.action == StepAction::Remove
              ? remove_placement(s, step.instance_id, catalog, rules)
              : apply_placement(s, step.placement, catalog, rules);
    }
  } catch (const Error&) {
    return false;
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

Plan build_continuation(const AssemblyState& current, const AssemblyState& final_state,
                        const std::vector<Edit>& path, const Catalog& catalog,
                        const ReplanOptions& options) {
  Plan plan;
  plan.mode = PlanMode::Graph;
  std::set<int> kept;
  for (const auto& p : current.placements) {
    kept.insert(p.instance_id);
  }
  for (const auto& e : path) {
    if (e.remove) {
      const Placement* p = current.find(e.instance_id);
      if (p != nullptr) {
        plan.steps.push_back(step_for(static_cast<int>(plan.steps.size()), *p, StepAction::Remove,
                                      catalog, options.frame));
        kept.erase(e.instance_id);
      }
    }
  }
  try {
    if (!kept.empty()) {
      const Plan adds = sequence_graph_from(final_state, kept, catalog, options.frame);
      for (const auto& s : adds.steps) {
        plan.steps.push_back(step_for(static_cast<int>(plan.steps.size()), s.placement,
                                      StepAction::Place, catalog, options.frame));
      }
      if (continuation_legal(current, plan, catalog, options.rules)) {
        return plan;
      }
    }
  } catch (const Error&) {
  }

  // Fall back to the order the search found, which is legal by construction.
  plan.steps.clear();
  std::map<int, Placement> lookup;
  for (const auto& p : current.placements) {
    lookup[p.instance_id] = p;
  }
  for (const auto& e : path) {
    if (e.remove) {
      plan.steps.push_back(step_for(static_cast<int>(plan.steps.size()), lookup.at(e.instance_id),
                                    StepAction::Remove, catalog, options.frame));
    } else {
      lookup[e.placement.instance_id] = e.placement;
      plan.steps.push_back(step_for(static_cast<int>(plan.steps.size()), e.placement,
                                    StepAction::Place, catalog, options.frame));
    }
  }
  return plan;
}

} // namespace

bool goals_satisfied(const AssemblyState& state, const GoalSet& goals, const Catalog& catalog,
                     const PlacementRules& rules) {
  if (state.empty() || static_cast<int>(state.placements.size()) > goals.max_components) {
    return false;
  }
  if (structure_height(state, catalog) < goals.target_height) {
    return false;
  }
  for (const auto& [type, n] : type_counts(state)) {
    if (n > limit_for(goals, type)) {
      return false;
    }
  }
  return is_connected(state, rules);
}

AssemblyState remove_placement(const AssemblyState& state, int instance_id, const Catalog& catalog,
                               const PlacementRules& rules) {
  const Placement* p = state.find(instance_id);
  if (p == nullptr) {
    fail(ErrorCode::UnknownInstance, std::to_string(instance_id));
  }
  catalog.type(p->type_id);
  AssemblyState next;
  next.inventory = state.inventory;
  next.inventory.counts[p->type_id] += 1;
  for (const auto& q : state.placements) {
    if (q.instance_id != instance_id) {
      next.placements.push_back(q);
    }
  }
  for (const auto& e : state.edges) {
    if (e.instance_a != instance_id && e.instance_b != instance_id) {
      next.edges.push_back(e);
    }
  }
  if (!is_connected(next, rules)) {
    fail(ErrorCode::WouldDisconnect, std::to_string(instance_id));
  }
  return next;
}

std::vector<std::int64_t> canonical_poses(const AssemblyState& state, const Catalog& catalog) {
  std::vector<std::int64_t> keys;
  keys.reserve(state.placements.size());
  for (const auto& p : state.placements) {
    keys.push_back(pose_key(p, catalog));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::uint64_t canonical_hash(const AssemblyState& state, const Catalog& catalog) {
  return fnv1a(canonical_poses(state, catalog));
}

int edit_distance(const AssemblyState& a, const AssemblyState& b, const Catalog& catalog) {
  const auto ka = canonical_poses(a, catalog);
  const auto kb = canonical_poses(b, catalog);
  std::vector<std::int64_t> diff;
  std::set_symmetric_difference(ka.begin(), ka.end(), kb.begin(), kb.end(),
                                std::back_inserter(diff));
  return static_cast<int>(diff.size());
}

int height_upper_bound(const AssemblyState& state, const GoalSet& goals, const Catalog& catalog,
                       const LatticeBounds& bounds) {
  auto counts = type_counts(state);
  for (const auto& [type, n] : state.inventory.counts) {
    counts[type] += n;
  }
  std::vector<int> heights;
  for (const auto& [type, n] : counts) {
    const int usable = std::min(n, limit_for(goals, type));
    for (int i = 0; i < usable; ++i) {
      heights.push_back(catalog.type(type).footprint.z());
    }
  }
  std::sort(heights.rbegin(), heights.rend());
  int total = 0;
  for (int i = 0; i < static_cast<int>(heights.size()) && i < goals.max_components; ++i) {
    total += heights[i];
  }
  return std::min(total, bounds.max.z() - std::min(bounds.min.z(), 0));
}

ReplanResult replan(const AssemblyState& current, const Deviation& deviation, const GoalSet& goals,
                    const Catalog& catalog, const ReplanOptions& options, std::stop_token stop) {
  if (options.k < 1) {
    throw std::invalid_argument("k must be at least 1");
  }
  (void)deviation;
  if (height_upper_bound(current, goals, catalog, options.bounds) < goals.target_height) {
    fail(ErrorCode::InfeasibleGoals, "target height beyond the parts available");
  }

  const int max_dz = std::max(1, catalog.max_height_dim());
  auto heuristic = [&](const AssemblyState& s) {
    const int deficit = goals.target_height - structure_height(s, catalog);
    return deficit <= 0 ? 0 : (deficit + max_dz - 1) / max_dz;
  };

  std::vector<Node> nodes;
  std::unordered_map<std::vector<std::int64_t>, int, KeyHash> best_g;
  std::unordered_map<std::vector<std::int64_t>, bool, KeyHash> closed;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
  std::uint64_t seq = 0;

  nodes.push_back({current, 0, -1, {}});
  best_g[canonical_poses(current, catalog)] = 0;
  open.push({heuristic(current), seq++, 0});

  std::vector<int> goal_nodes;
  std::vector<int> goal_costs; // non-decreasing, as popped
  ReplanResult result;
  bool exhausted_budget = false;

  while (!open.empty()) {
    if (stop.stop_requested()) {
      fail(ErrorCode::Cancelled, "replan");
    }
    const QueueEntry top = open.top();
    if (static_cast<int>(goal_costs.size()) >= options.k && top.f > goal_costs[options.k - 1]) {
      break;
    }
    open.pop();
    auto key = canonical_poses(nodes[top.node].state, catalog);
    if (closed.count(key) || nodes[top.node].g > best_g[key]) {
      continue;
    }
    if (result.expanded >= options.node_budget) {
      exhausted_budget = true;
      break;
    }
    closed[key] = true;
    ++result.expanded;

    const AssemblyState state = nodes[top.node].state;
    const int g = nodes[top.node].g;
    if (goals_satisfied(state, goals, catalog, options.rules)) {
      goal_nodes.push_back(top.node);
      goal_costs.push_back(g);
    }

    auto push = [&](AssemblyState child, Edit edit, int cost) {
      auto child_key = canonical_poses(child, catalog);
      if (closed.count(child_key)) {
        return;
      }
      const auto it = best_g.find(child_key);
      if (it != best_g.end() && it->second <= cost) {
        return;
      }
      best_g[child_key] = cost;
      const int f = cost + heuristic(child);
      nodes.push_back({std::move(child), cost, top.node, std::move(edit)});
      open.push({f, seq++, static_cast<int>(nodes.size()) - 1});
    };

    if (!state.empty()) {
      for (const auto& p : state.placements) {
        try {
          push(remove_placement(state, p.instance_id, catalog, options.rules),
               Edit{true, p.instance_id, p}, g + options.w_remove);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::WouldDisconnect) {
            throw;
          }
        }
      }
    }
    if (static_cast<int>(state.placements.size()) < goals.max_components) {
      const auto counts = type_counts(state);
      for (const auto& type : catalog.types()) {
        const auto c = counts.find(type.type_id);
        if ((c == counts.end() ? 0 : c->second) >= limit_for(goals, type.type_id)) {
          continue;
        }
        for (const auto& p : legal_placements(state, catalog, type.type_id, options.bounds,
                                              options.rules)) {
          push(apply_placement(state, p, catalog, options.rules), Edit{false, p.instance_id, p},
               g + options.w_add);
        }
      }
    }
  }

  if (goal_nodes.empty()) {
    if (exhausted_budget) {
      fail(ErrorCode::BudgetExceeded,
           "no goal state within " + std::to_string(options.node_budget) + " expansions");
    }
    fail(ErrorCode::InfeasibleGoals, "search space exhausted");
  }
  result.truncated = exhausted_budget;

  std::vector<CandidatePlan> all;
  for (int gi : goal_nodes) {
    std::vector<Edit> path;
    for (int n = gi; nodes[n].parent >= 0; n = nodes[n].parent) {
      path.push_back(nodes[n].edit);
    }
    std::reverse(path.begin(), path.end());

    CandidatePlan c;
    c.final_state = nodes[gi].state;
    c.edit_cost = nodes[gi].g;
    for (const auto& e : path) {
      if (e.remove) {
        c.removals.push_back(e.instance_id);
      } else {
        c.additions.push_back(e.placement);
      }
    }
    c.continuation = build_continuation(current, c.final_state, path, catalog, options);
    c.stability = analyze(c.final_state, catalog, options.rigid_joints);
    c.goal_satisfied = true;
    c.state_hash = canonical_hash(c.final_state, catalog);
    all.push_back(std::move(c));
  }
  std::stable_sort(all.begin(), all.end(), [](const CandidatePlan& a, const CandidatePlan& b) {
    if (a.edit_cost != b.edit_cost) {
      return a.edit_cost < b.edit_cost;
    }
    if (a.stability.score != b.stability.score) {
      return a.stability.score > b.stability.score;
    }
    return a.state_hash < b.state_hash;
  });

  for (auto& c : all) {
    if (static_cast<int>(result.candidates.size()) >= options.k) {
      break;
    }
    const bool diverse = std::all_of(
        result.candidates.begin(), result.candidates.end(), [&](const CandidatePlan& chosen) {
          return edit_distance(chosen.final_state, c.final_state, catalog) >= options.diversity_min;
        });
    if (diverse) {
      result.candidates.push_back(std::move(c));
    }
  }
  return result;
}

std::vector<CandidatePlan> score_candidates(std::vector<CandidatePlan> candidates,
                                            const Catalog& catalog, bool rigid_joints) {
  for (auto& c : candidates) {
    c.stability = analyze(c.final_state, catalog, rigid_joints);
  }
  return candidates;
}

nlohmann::json to_json(const GoalSet& g) {
  nlohmann::json limits = nlohmann::json::object();
  for (const auto& [type, n] : g.per_type_limits) {
    limits[std::to_string(type)] = n;
  }
  return {{"target_height", g.target_height},
          {"max_components", g.max_components},
          {"per_type_limits", limits}};
}

GoalSet goals_from_json(const nlohmann::json& j) {
  try {
    GoalSet g;
    g.target_height = j.at("target_height").get<int>();
    g.max_components = j.at("max_components").get<int>();
    if (j.contains("per_type_limits")) {
      for (const auto& [k, v] : j.at("per_type_limits").items()) {
        g.per_type_limits[std::stoi(k)] = v.get<int>();
      }
    }
    if (g.target_height < 1 || g.max_components < 1) {
      fail(ErrorCode::MalformedDocument, "goals need target_height >= 1 and max_components >= 1");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedDocument, std::string("goals: ") + e.what());
  } catch (const std::logic_error& e) {
    fail(ErrorCode::MalformedDocument, std::string("goals: ") + e.what());
  }
}

nlohmann::json to_json(const Deviation& d) {
  return {{"expected", to_json(d.expected)},
          {"actual", to_json(d.actual)},
          {"step_index", d.step_index}};
}

nlohmann::json to_json(const CandidatePlan& c) {
  nlohmann::json adds = nlohmann::json::array();
  for (const auto& p : c.additions) {
    adds.push_back(to_json(p));
  }
  return {{"final_state", to_json(c.final_state)},
          {"continuation", to_json(c.continuation)},
          {"edit_cost", c.edit_cost},
          {"removals", c.removals},
          {"additions", adds},
          {"stability", to_json(c.stability)},
          {"goal_satisfied", c.goal_satisfied},
          {"state_hash", c.state_hash}};
}

} // namespace ae
