#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "erm/simulator.hpp"

namespace erm {

// Behavior model for the agents that are not the one building the tree.
enum class OtherAgentModel { Static, Queue };

struct PlannerConfig {
  int iteration_limit = 250;
  double horizon_min = 120.0;
  double psi = 10.0;               // distance weight in the balancing reward
  double alpha_per_second = 0.99995;
  double rebalance_period_min = 60.0;
  int n_chains = 5;                // sampled incident chains averaged per decision
  double ucb_c = 1.4142135623730951;
  OtherAgentModel other_agent_model = OtherAgentModel::Static;
};

// Discount applied t_h minutes into the planning horizon. alpha is a
// per-second factor, so the exponent is in seconds.
double discount(double alpha_per_second, double t_h_min);

// Reward updates. Both subtract from the running total: the discounted
// response time for a dispatch, or the discounted fleet-average balancing
// distance weighted by psi.
double respond_reward(double prev, double response_minutes, double t_h_min,
                      const PlannerConfig& cfg);
double balance_reward(double prev, double total_miles, int fleet, double t_h_min,
                      const PlannerConfig& cfg);

// Pseudo-actions for chance nodes: an incident is handled by greedy dispatch,
// and a balancing event passes agents that are busy.
inline constexpr int kActionDispatch = -2;
inline constexpr int kActionNoDecision = -3;

struct PlanEvent {
  double time = 0.0;
  bool rebalance = false;
  IncidentEvent incident{};
};

// Sampled incidents strictly after t0 merged with balancing markers at
// t0 + k * period, all within [t0, t0 + horizon]. Incidents precede markers
// at equal times, matching the live event loop.
std::vector<PlanEvent> build_plan_events(const IncidentChain& chain, double t0,
                                         double horizon_min, double period_min);

struct TreeNode {
  explicit TreeNode(Engine e) : engine(std::move(e)) {}

  TreeNode* parent = nullptr;
  int incoming_action = kActionNoDecision;  // depot id or pseudo-action
  // World advanced to the time of events[next_event], which is not yet
  // applied; rho covers everything strictly before it.
  Engine engine;
  double rho = 0.0;
  int visits = 0;
  double total_value = 0.0;
  std::size_t next_event = 0;
  std::vector<int> untried;
  std::vector<std::unique_ptr<TreeNode>> children;

  double mean_value() const { return total_value / static_cast<double>(visits); }
};

struct SearchContext {
  PlannerConfig cfg;
  AgentId agent = 0;
  double t0 = 0.0;
  double horizon_end = 0.0;
  int fleet = 0;
  const std::vector<PlanEvent>* events = nullptr;
  // Commit order of the full-fleet greedy placement; backs the Queue
  // other-agent model. May be null under the Static model.
  const std::vector<DepotId>* queue_trace = nullptr;
};

std::unique_ptr<TreeNode> build_root(const Engine& snapshot, const SearchContext& ctx);

// UCB1 over fully-expanded children; ties go to the lowest action id.
TreeNode& ucb1_select(TreeNode& node, double ucb_c);

// Pops one untried action, applies the event, fast-forwards to the next
// event time, and returns the new child.
TreeNode& expand(TreeNode& node, const SearchContext& ctx);

// Greedy dispatch without balancing through the remaining events; returns
// the terminal accumulated reward.
double rollout(const TreeNode& node, const SearchContext& ctx);

void backpropagate(TreeNode* node, double value);

void run_search(TreeNode& root, const SearchContext& ctx, int iterations);

struct ActionValue {
  int action = 0;
  double value = -std::numeric_limits<double>::infinity();
};
// Every depot action, sorted by descending value (ties: ascending id).
using RankedActions = std::vector<ActionValue>;

struct SearchOutcome {
  RankedActions ranked;
  std::vector<std::unique_ptr<TreeNode>> roots;  // one tree per chain
};

// Per-agent decentralized search: one tree per sampled chain, values
// averaged across chains.
SearchOutcome mmcts(const Engine& snapshot, AgentId agent,
                    const std::vector<IncidentChain>& chains, const PlannerConfig& cfg,
                    double t0, const std::vector<DepotId>* queue_trace);

// Centralized constraint filter: repeatedly commits the highest-valued valid
// (agent, depot) pair until every agent in `ranked` is assigned. Returns the
// commits in order.
std::vector<std::pair<AgentId, DepotId>> action_filter(
    const WorldState& state, const std::map<AgentId, RankedActions>& ranked,
    const std::vector<Depot>& depots);

// The full decision process: sample chains (or slice the oracle), search per
// available agent, filter, and hand the joint assignment to the simulator.
class MctsPlanner final : public RebalancePolicy {
 public:
  MctsPlanner(PlannerConfig cfg, RateMap rates, std::optional<IncidentChain> oracle,
              ServiceModel sm, double queue_roi, std::uint64_t seed);

  std::optional<std::map<AgentId, DepotId>> propose(const Engine& engine, double now) override;

 private:
  PlannerConfig cfg_;
  RateMap rates_;
  std::optional<IncidentChain> oracle_;
  ServiceModel sm_;
  double queue_roi_;
  std::uint64_t seed_;
  int calls_ = 0;
  std::optional<std::vector<DepotId>> trace_;
};

}  // namespace erm
