#include "erm/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erm/assignment.hpp"

namespace erm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Folds any response records the engine produced since `cursor` into rho.
// The discount clock is the dispatch instant; the charge is the full
// awareness-to-arrival response time.
double accrue_responses(const Engine& engine, std::size_t& cursor, double rho,
                        const SearchContext& ctx) {
  const auto& recs = engine.responses();
  for (; cursor < recs.size(); ++cursor) {
    const auto& r = recs[cursor];
    rho = respond_reward(rho, r.response_minutes(), r.t_dispatch - ctx.t0, ctx.cfg);
  }
  return rho;
}

bool agent_available(const Engine& engine, AgentId agent) {
  for (const auto& r : engine.state().responders) {
    if (r.id == agent) return r.available();
  }
  throw std::logic_error("planning agent missing from state");
}

CellId agent_position(const Engine& engine, AgentId agent) {
  for (const auto& r : engine.state().responders) {
    if (r.id == agent) return r.position;
  }
  throw std::logic_error("agent missing from state");
}

std::vector<int> candidate_actions(const Engine& engine, AgentId agent, const PlanEvent& ev) {
  if (!ev.rebalance) return {kActionDispatch};
  if (!agent_available(engine, agent)) return {kActionNoDecision};
  std::vector<int> depots;
  for (const auto& d : engine.depots()) depots.push_back(d.id);
  std::sort(depots.begin(), depots.end());
  return depots;
}

// Queue-model moves for the agents other than the planner: fill target slots
// in greedy-trace order (skipping depots without spare capacity, including
// the slot the planning agent just reserved), then match agents to targets
// by distance.
std::map<AgentId, DepotId> queue_model_moves(const Engine& engine, AgentId planning_agent,
                                             std::optional<DepotId> planning_target,
                                             const std::vector<DepotId>& trace) {
  std::vector<AgentId> others;
  for (AgentId a : engine.available_agents()) {
    if (a != planning_agent) others.push_back(a);
  }
  std::map<AgentId, DepotId> moves;
  if (others.empty()) return moves;

  std::map<DepotId, int> remaining;
  for (const auto& d : engine.depots()) remaining[d.id] = d.capacity;
  for (const auto& [d, n] : engine.reserved_slots()) remaining[d] -= n;
  if (planning_target) --remaining[*planning_target];

  std::vector<DepotId> targets;
  for (DepotId d : trace) {
    if (targets.size() == others.size()) break;
    if (remaining[d] > 0) {
      targets.push_back(d);
      --remaining[d];
    }
  }
  if (targets.size() < others.size()) {
    for (const auto& d : engine.depots()) {
      while (targets.size() < others.size() && remaining[d.id] > 0) {
        targets.push_back(d.id);
        --remaining[d.id];
      }
    }
  }

  // Leftover agents (no spare capacity anywhere) stay put.
  const std::size_t n = std::min(others.size(), targets.size());
  if (n == 0) return moves;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const CellId pos = agent_position(engine, others[i]);
    for (std::size_t j = 0; j < n; ++j) {
      cost[i][j] = distance_miles(pos, engine.depot(targets[j]).cell, engine.grid());
    }
  }
  const auto cols = min_cost_assignment(cost);
  for (std::size_t i = 0; i < n; ++i) {
    moves[others[i]] = targets[static_cast<std::size_t>(cols[i])];
  }
  return moves;
}

}  // namespace

double discount(double alpha_per_second, double t_h_min) {
  return std::pow(alpha_per_second, 60.0 * t_h_min);
}

double respond_reward(double prev, double response_minutes, double t_h_min,
                      const PlannerConfig& cfg) {
  return prev - discount(cfg.alpha_per_second, t_h_min) * response_minutes;
}

double balance_reward(double prev, double total_miles, int fleet, double t_h_min,
                      const PlannerConfig& cfg) {
  return prev - discount(cfg.alpha_per_second, t_h_min) * cfg.psi * total_miles /
                    static_cast<double>(fleet);
}

std::vector<PlanEvent> build_plan_events(const IncidentChain& chain, double t0,
                                         double horizon_min, double period_min) {
  std::vector<PlanEvent> events;
  const double end = t0 + horizon_min;
  for (const auto& ev : chain.events) {
    if (ev.time_min <= t0 || ev.time_min > end) continue;
    events.push_back(PlanEvent{ev.time_min, false, ev});
  }
  for (int k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * period_min;
    if (t > end + 1e-9) break;
    events.push_back(PlanEvent{t, true, {}});
  }
  std::sort(events.begin(), events.end(), [](const PlanEvent& a, const PlanEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.rebalance < b.rebalance;  // incidents before markers
  });
  return events;
}

std::unique_ptr<TreeNode> build_root(const Engine& snapshot, const SearchContext& ctx) {
  auto root = std::make_unique<TreeNode>(snapshot);
  const auto& events = *ctx.events;
  if (events.empty()) {
    root->engine.advance_to(ctx.horizon_end);
    return root;
  }
  std::size_t cursor = root->engine.responses().size();
  root->engine.advance_to(events[0].time);
  root->rho = accrue_responses(root->engine, cursor, root->rho, ctx);
  root->untried = candidate_actions(root->engine, ctx.agent, events[0]);
  return root;
}

TreeNode& ucb1_select(TreeNode& node, double ucb_c) {
  if (!node.untried.empty()) throw std::logic_error("ucb1_select on a node with untried actions");
  if (node.children.empty()) throw std::logic_error("ucb1_select on a childless node");
  TreeNode* best = nullptr;
  double best_score = kNegInf;
  const double log_n = std::log(static_cast<double>(node.visits));
  for (const auto& child : node.children) {
    const double score =
        child->mean_value() + ucb_c * std::sqrt(log_n / static_cast<double>(child->visits));
    if (best == nullptr || score > best_score ||
        (score == best_score && child->incoming_action < best->incoming_action)) {
      best = child.get();
      best_score = score;
    }
  }
  return *best;
}

TreeNode& expand(TreeNode& node, const SearchContext& ctx) {
  if (node.untried.empty()) throw std::logic_error("expand on a node without untried actions");
  const auto& events = *ctx.events;
  const PlanEvent& ev = events[node.next_event];

  const int action = node.untried.front();
  node.untried.erase(node.untried.begin());

  auto child = std::make_unique<TreeNode>(node.engine);
  child->parent = &node;
  child->incoming_action = action;
  child->rho = node.rho;
  child->next_event = node.next_event + 1;

  std::size_t cursor = child->engine.responses().size();
  if (ev.rebalance) {
    std::map<AgentId, DepotId> moves;
    if (action >= 0) moves[ctx.agent] = action;
    if (ctx.cfg.other_agent_model == OtherAgentModel::Queue && ctx.queue_trace != nullptr) {
      std::optional<DepotId> target;
      if (action >= 0) target = action;
      auto other = queue_model_moves(child->engine, ctx.agent, target, *ctx.queue_trace);
      moves.insert(other.begin(), other.end());
    }
    double phi_sum = 0.0;
    for (const auto& [agent, miles] : child->engine.apply_moves(moves)) phi_sum += miles;
    child->rho = balance_reward(child->rho, phi_sum, ctx.fleet, ev.time - ctx.t0, ctx.cfg);
  } else {
    child->engine.inject_incident(ev.incident);
    child->rho = accrue_responses(child->engine, cursor, child->rho, ctx);
  }

  const double t_next =
      child->next_event < events.size() ? events[child->next_event].time : ctx.horizon_end;
  child->engine.advance_to(t_next);
  child->rho = accrue_responses(child->engine, cursor, child->rho, ctx);
  if (child->next_event < events.size()) {
    child->untried = candidate_actions(child->engine, ctx.agent, events[child->next_event]);
  }

  node.children.push_back(std::move(child));
  return *node.children.back();
}

double rollout(const TreeNode& node, const SearchContext& ctx) {
  const auto& events = *ctx.events;
  if (node.next_event >= events.size()) return node.rho;

  Engine eng = node.engine;
  double rho = node.rho;
  std::size_t cursor = eng.responses().size();
  for (std::size_t i = node.next_event; i < events.size(); ++i) {
    const PlanEvent& ev = events[i];
    if (ev.rebalance) continue;
    eng.advance_to(ev.time);
    rho = accrue_responses(eng, cursor, rho, ctx);
    eng.inject_incident(ev.incident);
    rho = accrue_responses(eng, cursor, rho, ctx);
  }
  eng.advance_to(ctx.horizon_end);
  return accrue_responses(eng, cursor, rho, ctx);
}

void backpropagate(TreeNode* node, double value) {
  for (; node != nullptr; node = node->parent) {
    ++node->visits;
    node->total_value += value;
  }
}

void run_search(TreeNode& root, const SearchContext& ctx, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    TreeNode* node = &root;
    while (node->untried.empty() && !node->children.empty()) {
      node = &ucb1_select(*node, ctx.cfg.ucb_c);
    }
    if (!node->untried.empty()) node = &expand(*node, ctx);
    const double value = rollout(*node, ctx);
    backpropagate(node, value);
  }
}

SearchOutcome mmcts(const Engine& snapshot, AgentId agent,
                    const std::vector<IncidentChain>& chains, const PlannerConfig& cfg,
                    double t0, const std::vector<DepotId>* queue_trace) {
  if (chains.empty()) throw std::domain_error("mmcts needs at least one chain");
  SearchOutcome out;
  std::map<int, std::pair<double, int>> sums;  // action -> (value sum, samples)
  for (const auto& d : snapshot.depots()) sums[d.id] = {0.0, 0};

  for (const auto& chain : chains) {
    const auto events = build_plan_events(chain, t0, cfg.horizon_min, cfg.rebalance_period_min);
    SearchContext ctx;
    ctx.cfg = cfg;
    ctx.agent = agent;
    ctx.t0 = t0;
    ctx.horizon_end = t0 + cfg.horizon_min;
    ctx.fleet = snapshot.fleet_size();
    ctx.events = &events;
    ctx.queue_trace = queue_trace;

    auto root = build_root(snapshot, ctx);
    run_search(*root, ctx, cfg.iteration_limit);
    for (const auto& child : root->children) {
      if (child->incoming_action < 0) continue;
      auto& [sum, n] = sums[child->incoming_action];
      sum += child->mean_value();
      ++n;
    }
    out.roots.push_back(std::move(root));
  }

  for (const auto& [action, acc] : sums) {
    ActionValue av;
    av.action = action;
    if (acc.second > 0) av.value = acc.first / static_cast<double>(acc.second);
    out.ranked.push_back(av);
  }
  std::sort(out.ranked.begin(), out.ranked.end(), [](const ActionValue& a, const ActionValue& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.action < b.action;
  });
  return out;
}

std::vector<std::pair<AgentId, DepotId>> action_filter(
    const WorldState& state, const std::map<AgentId, RankedActions>& ranked,
    const std::vector<Depot>& depots) {
  std::map<DepotId, int> remaining;
  for (const auto& d : depots) remaining[d.id] = d.capacity;
  for (const auto& r : state.responders) {
    if (r.status == ResponderStatus::Rebalancing && r.home_depot) --remaining[*r.home_depot];
  }

  std::vector<AgentId> unassigned;
  for (const auto& [a, actions] : ranked) unassigned.push_back(a);

  std::vector<std::pair<AgentId, DepotId>> commits;
  while (!unassigned.empty()) {
    AgentId best_agent = -1;
    int best_action = -1;
    double best_value = kNegInf;
    for (AgentId a : unassigned) {
      for (const auto& av : ranked.at(a)) {
        auto it = remaining.find(av.action);
        if (it == remaining.end() || it->second <= 0) continue;
        if (best_agent < 0 || av.value > best_value) {
          best_agent = a;
          best_action = av.action;
          best_value = av.value;
        }
        break;  // the list is sorted: the first valid action is this agent's best
      }
    }
    if (best_agent < 0) {
      throw std::domain_error("action filter ran out of depot capacity");
    }
    commits.emplace_back(best_agent, best_action);
    --remaining[best_action];
    unassigned.erase(std::find(unassigned.begin(), unassigned.end(), best_agent));
  }
  return commits;
}

MctsPlanner::MctsPlanner(PlannerConfig cfg, RateMap rates, std::optional<IncidentChain> oracle,
                         ServiceModel sm, double queue_roi, std::uint64_t seed)
    : cfg_(cfg),
      rates_(std::move(rates)),
      oracle_(std::move(oracle)),
      sm_(sm),
      queue_roi_(queue_roi),
      seed_(seed) {}

std::optional<std::map<AgentId, DepotId>> MctsPlanner::propose(const Engine& engine, double now) {
  ++calls_;
  const auto avail = engine.available_agents();
  std::map<AgentId, DepotId> assignment;
  if (avail.empty()) return assignment;

  if (cfg_.other_agent_model == OtherAgentModel::Queue && !trace_) {
    std::vector<DepotId> trace;
    greedy_place(engine.fleet_size(), engine.depots(), rates_, sm_, engine.grid(),
                 engine.travel(), queue_roi_, &trace);
    trace_ = std::move(trace);
  }

  std::vector<IncidentChain> chains;
  if (oracle_) {
    chains.push_back(oracle_chain(oracle_->events, now, cfg_.horizon_min));
  } else {
    const std::uint64_t call_seed = derive_seed(seed_, static_cast<std::uint64_t>(calls_));
    for (int i = 0; i < cfg_.n_chains; ++i) {
      chains.push_back(
          sample_chain(rates_, now, cfg_.horizon_min, derive_seed(call_seed, static_cast<std::uint64_t>(i))));
    }
  }

  const Engine snapshot = engine.planning_snapshot();
  std::map<AgentId, RankedActions> ranked;
  for (AgentId a : avail) {
    ranked[a] = mmcts(snapshot, a, chains, cfg_, now, trace_ ? &*trace_ : nullptr).ranked;
  }
  for (const auto& [agent, depot] : action_filter(snapshot.state(), ranked, engine.depots())) {
    assignment[agent] = depot;
  }
  return assignment;
}

}  // namespace erm
