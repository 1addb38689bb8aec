#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "erm/incidents.hpp"
#include "erm/queueing.hpp"
#include "erm/rng.hpp"
#include "erm/spatial.hpp"

namespace erm {

enum class ResponderStatus {
  AvailableAtDepot,   // idle; the waiting cell may be an ad-hoc station
  EnRouteToIncident,
  Servicing,
  Rebalancing,
};

struct ResponderState {
  AgentId id = 0;
  CellId position = 0;
  CellId destination = 0;
  ResponderStatus status = ResponderStatus::AvailableAtDepot;
  std::optional<double> busy_until;      // next transition time while busy
  std::optional<DepotId> home_depot;     // depot occupied or being moved to;
                                         // empty while busy or idling ad-hoc

  bool available() const { return status == ResponderStatus::AvailableAtDepot; }
};

struct WorldState {
  double time_min = 0.0;
  std::deque<IncidentEvent> pending;     // incidents waiting, FIFO by awareness
  std::vector<ResponderState> responders;
};

struct ResponseRecord {
  std::int64_t incident_id = 0;
  double t_aware = 0.0;
  double t_dispatch = 0.0;
  double t_arrive = 0.0;
  AgentId responder = 0;

  double response_minutes() const { return t_arrive - t_aware; }
};

struct RebalanceEntry {
  double step_time = 0.0;
  AgentId agent = 0;
  double miles = 0.0;
};

enum class SimEventKind { Incident, ServiceDone, Rebalance, Arrival };

struct SimEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::Arrival;
  AgentId agent = -1;
  std::uint64_t seq = 0;
};

// On-scene service duration. Constant by default; exponential sits behind
// the same seam for deployments with learned service times.
struct ServiceTimeModel {
  enum class Kind { Constant, Exponential };
  Kind kind = Kind::Constant;
  double mean_minutes = 20.0;

  double draw(Rng& rng) const {
    if (kind == Kind::Constant) return mean_minutes;
    return rng.exponential(1.0 / mean_minutes);
  }
};

// Discrete-event world engine. Value type: planners copy it freely to
// simulate futures. Incident and rebalance events are driven externally;
// the engine owns agent movement and service completion, including FIFO
// draining of the waiting queue.
class Engine {
 public:
  Engine(Grid grid, TravelModel tm, std::vector<Depot> depots, ServiceTimeModel service,
         WorldState initial, std::uint64_t seed);

  const WorldState& state() const { return state_; }
  const Grid& grid() const { return grid_; }
  const TravelModel& travel() const { return tm_; }
  const std::vector<Depot>& depots() const { return depots_; }
  int fleet_size() const { return static_cast<int>(state_.responders.size()); }

  // Process internal events up to and including time t, then move the clock
  // to t.
  void advance_to(double t);
  // Process every remaining internal event (drains the waiting queue).
  void advance_drain();

  // An incident becomes known at ev.time_min (>= current time). Dispatches
  // the nearest available responder or appends to the waiting queue.
  void inject_incident(const IncidentEvent& ev);

  // Joint rebalancing action over exactly the currently available agents.
  // Checks coverage and depot capacities; returns miles moved per agent.
  std::map<AgentId, double> apply_rebalance(const std::map<AgentId, DepotId>& assignment);

  // Planner-facing variant: moves any subset of available agents and skips
  // capacity checks (search must evaluate currently-invalid actions too).
  std::map<AgentId, double> apply_moves(const std::map<AgentId, DepotId>& assignment);

  std::vector<AgentId> available_agents() const;
  // Available agents per home depot (ad-hoc idlers belong to no depot).
  std::map<DepotId, int> depot_occupancy() const;
  // Slots held by in-flight rebalancers, per depot.
  std::map<DepotId, int> reserved_slots() const;
  const Depot& depot(DepotId id) const;

  const std::vector<ResponseRecord>& responses() const { return responses_; }
  const std::vector<RebalanceEntry>& rebalance_log() const { return rebalance_log_; }

  // Copy with logs and time-collision history dropped; in-flight arrivals
  // and service completions survive. Starting point for search trees.
  Engine planning_snapshot() const;

  // Contract checks used by tests.
  void assert_invariants() const;

 private:
  double schedule(SimEventKind kind, AgentId agent, double t);
  void handle(const SimEvent& ev);
  void on_arrival(AgentId agent);
  void on_service_done(AgentId agent);
  void dispatch(AgentId agent, const IncidentEvent& ev, double aware_time);
  ResponderState& responder(AgentId id);

  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time < b.time;
      return a.seq < b.seq;
    }
  };

  Grid grid_;
  TravelModel tm_;
  std::vector<Depot> depots_;
  ServiceTimeModel service_;
  WorldState state_;
  std::multiset<SimEvent, EventOrder> queue_;
  std::set<double> used_times_;
  std::vector<ResponseRecord> responses_;
  std::vector<RebalanceEntry> rebalance_log_;
  Rng rng_;
  std::uint64_t seq_ = 0;
};

// Inter-incident rebalancing decision rule invoked at every balancing event.
class RebalancePolicy {
 public:
  virtual ~RebalancePolicy() = default;
  // nullopt skips the step entirely (the no-rebalancing baseline); an empty
  // map is a step in which no agent happens to be available.
  virtual std::optional<std::map<AgentId, DepotId>> propose(const Engine& engine, double now) = 0;
};

class NoRebalancePolicy final : public RebalancePolicy {
 public:
  std::optional<std::map<AgentId, DepotId>> propose(const Engine&, double) override {
    return std::nullopt;
  }
};

// Multi-server-queue heuristic: greedy depot selection on historical rates,
// then distance-minimizing agent assignment.
class QueueRebalancePolicy final : public RebalancePolicy {
 public:
  QueueRebalancePolicy(RateMap rates, ServiceModel sm, double roi_miles)
      : rates_(std::move(rates)), sm_(sm), roi_(roi_miles) {}

  std::optional<std::map<AgentId, DepotId>> propose(const Engine& engine, double now) override;

 private:
  RateMap rates_;
  ServiceModel sm_;
  double roi_;
};

struct SimulationResult {
  std::vector<ResponseRecord> responses;
  std::vector<RebalanceEntry> rebalances;
  std::vector<double> rebalance_steps;  // times at which the policy acted
};

// Runs the merged event stream: chain incidents plus rebalance markers every
// `rebalance_period_min` after the chain start (inclusive of the end), then
// drains outstanding work so every incident gets a response record.
SimulationResult run_simulation(Engine& engine, RebalancePolicy& policy,
                                const IncidentChain& chain, double rebalance_period_min);

// Fleet of n agents standing at depots in ascending depot-id order according
// to `occ`; agent ids run 0..n-1.
WorldState initial_world(const std::vector<Depot>& depots, const Occupancy& occ, double t0);

void write_responses_csv(const std::string& path, const std::vector<ResponseRecord>& records);
void write_rebalances_csv(const std::string& path, const std::vector<RebalanceEntry>& entries);

}  // namespace erm
