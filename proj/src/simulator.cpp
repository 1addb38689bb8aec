#include "erm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace erm {

Engine::Engine(Grid grid, TravelModel tm, std::vector<Depot> depots, ServiceTimeModel service,
               WorldState initial, std::uint64_t seed)
    : grid_(grid),
      tm_(tm),
      depots_(std::move(depots)),
      service_(service),
      state_(std::move(initial)),
      rng_(seed) {
  validate_grid(grid_);
  validate_depots(depots_, grid_);
  for (const auto& r : state_.responders) {
    grid_.require_valid(r.position);
    grid_.require_valid(r.destination);
  }
}

ResponderState& Engine::responder(AgentId id) {
  for (auto& r : state_.responders) {
    if (r.id == id) return r;
  }
  throw std::logic_error("unknown agent id " + std::to_string(id));
}

const Depot& Engine::depot(DepotId id) const {
  for (const auto& d : depots_) {
    if (d.id == id) return d;
  }
  throw std::logic_error("unknown depot id " + std::to_string(id));
}

double Engine::schedule(SimEventKind kind, AgentId agent, double t) {
  while (!used_times_.insert(t).second) t += kEventTimeEpsilonMin;
  queue_.insert(SimEvent{t, kind, agent, seq_++});
  return t;
}

void Engine::advance_to(double t) {
  while (!queue_.empty() && queue_.begin()->time <= t) {
    const SimEvent ev = *queue_.begin();
    queue_.erase(queue_.begin());
    state_.time_min = ev.time;
    handle(ev);
  }
  if (t > state_.time_min) state_.time_min = t;
}

void Engine::advance_drain() {
  while (!queue_.empty()) {
    const SimEvent ev = *queue_.begin();
    queue_.erase(queue_.begin());
    state_.time_min = ev.time;
    handle(ev);
  }
}

void Engine::handle(const SimEvent& ev) {
  switch (ev.kind) {
    case SimEventKind::Arrival:
      on_arrival(ev.agent);
      break;
    case SimEventKind::ServiceDone:
      on_service_done(ev.agent);
      break;
    default:
      throw std::logic_error("incident/rebalance events are driven externally");
  }
}

void Engine::dispatch(AgentId agent, const IncidentEvent& ev, double aware_time) {
  auto& r = responder(agent);
  const double travel = travel_minutes(r.position, ev.cell, grid_, tm_);
  const double arrive = schedule(SimEventKind::Arrival, agent, state_.time_min + travel);
  r.status = ResponderStatus::EnRouteToIncident;
  r.destination = ev.cell;
  r.busy_until = arrive;
  r.home_depot.reset();
  responses_.push_back(ResponseRecord{ev.id, aware_time, state_.time_min, arrive, agent});
}

void Engine::inject_incident(const IncidentEvent& ev) {
  grid_.require_valid(ev.cell);
  if (ev.time_min < state_.time_min - kEventTimeEpsilonMin) {
    throw std::logic_error("incident injected in the past");
  }
  state_.time_min = std::max(state_.time_min, ev.time_min);

  AgentId best = -1;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& r : state_.responders) {
    if (!r.available()) continue;
    const double t = travel_minutes(r.position, ev.cell, grid_, tm_);
    if (t < best_t || (t == best_t && (best < 0 || r.id < best))) {
      best_t = t;
      best = r.id;
    }
  }
  if (best < 0) {
    state_.pending.push_back(ev);
    return;
  }
  dispatch(best, ev, ev.time_min);
}

void Engine::on_arrival(AgentId agent) {
  auto& r = responder(agent);
  if (r.status == ResponderStatus::EnRouteToIncident) {
    r.position = r.destination;
    r.status = ResponderStatus::Servicing;
    const double done =
        schedule(SimEventKind::ServiceDone, agent, state_.time_min + service_.draw(rng_));
    r.busy_until = done;
    return;
  }
  if (r.status == ResponderStatus::Rebalancing) {
    r.position = r.destination;
    r.status = ResponderStatus::AvailableAtDepot;
    r.busy_until.reset();
    return;
  }
  throw std::logic_error("arrival for an agent that is not moving");
}

void Engine::on_service_done(AgentId agent) {
  auto& r = responder(agent);
  if (r.status != ResponderStatus::Servicing) {
    throw std::logic_error("service completion for a non-servicing agent");
  }
  if (!state_.pending.empty()) {
    const IncidentEvent next = state_.pending.front();
    state_.pending.pop_front();
    dispatch(agent, next, next.time_min);
    return;
  }
  // Idle at the incident cell as an ad-hoc station until the next rebalance.
  r.status = ResponderStatus::AvailableAtDepot;
  r.destination = r.position;
  r.busy_until.reset();
  r.home_depot.reset();
}

std::map<AgentId, double> Engine::apply_moves(const std::map<AgentId, DepotId>& assignment) {
  std::map<AgentId, double> miles;
  for (const auto& [agent, depot_id] : assignment) {
    auto& r = responder(agent);
    if (!r.available()) {
      throw std::logic_error("rebalance assignment for a busy agent");
    }
    const Depot& d = depot(depot_id);
    const double dist = distance_miles(r.position, d.cell, grid_);
    miles[agent] = dist;
    rebalance_log_.push_back(RebalanceEntry{state_.time_min, agent, dist});
    if (dist == 0.0) {
      r.home_depot = depot_id;
      r.destination = r.position;
      continue;
    }
    const double arrive =
        schedule(SimEventKind::Arrival, agent, state_.time_min + dist / tm_.speed_mi_per_min);
    r.status = ResponderStatus::Rebalancing;
    r.destination = d.cell;
    r.home_depot = depot_id;
    r.busy_until = arrive;
  }
  return miles;
}

std::map<AgentId, double> Engine::apply_rebalance(const std::map<AgentId, DepotId>& assignment) {
  const auto avail = available_agents();
  if (assignment.size() != avail.size()) {
    throw std::logic_error("rebalance assignment must cover exactly the available agents");
  }
  for (AgentId a : avail) {
    if (!assignment.count(a)) {
      throw std::logic_error("available agent missing from rebalance assignment");
    }
  }
  std::map<DepotId, int> load = reserved_slots();
  for (const auto& [agent, depot_id] : assignment) ++load[depot_id];
  for (const auto& [depot_id, n] : load) {
    if (n > depot(depot_id).capacity) {
      throw std::logic_error("rebalance assignment exceeds depot capacity");
    }
  }
  return apply_moves(assignment);
}

std::vector<AgentId> Engine::available_agents() const {
  std::vector<AgentId> out;
  for (const auto& r : state_.responders) {
    if (r.available()) out.push_back(r.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<DepotId, int> Engine::depot_occupancy() const {
  std::map<DepotId, int> occ;
  for (const auto& r : state_.responders) {
    if (r.available() && r.home_depot) ++occ[*r.home_depot];
  }
  return occ;
}

std::map<DepotId, int> Engine::reserved_slots() const {
  std::map<DepotId, int> out;
  for (const auto& r : state_.responders) {
    if (r.status == ResponderStatus::Rebalancing && r.home_depot) ++out[*r.home_depot];
  }
  return out;
}

Engine Engine::planning_snapshot() const {
  Engine copy(*this);
  copy.responses_.clear();
  copy.rebalance_log_.clear();
  copy.used_times_.clear();
  for (const auto& ev : copy.queue_) copy.used_times_.insert(ev.time);
  return copy;
}

void Engine::assert_invariants() const {
  std::map<DepotId, int> per_depot;
  int available = 0;
  for (const auto& r : state_.responders) {
    if (r.available()) {
      if (r.busy_until) throw std::logic_error("available agent has busy_until");
      if (r.destination != r.position) throw std::logic_error("available agent mid-move");
      ++available;
      if (r.home_depot) ++per_depot[*r.home_depot];
    } else {
      if (!r.busy_until) throw std::logic_error("busy agent lacks busy_until");
    }
    if (r.status == ResponderStatus::Rebalancing && r.home_depot) ++per_depot[*r.home_depot];
  }
  for (const auto& [d, n] : per_depot) {
    if (n > depot(d).capacity) throw std::logic_error("depot over capacity");
  }
  if (!state_.pending.empty() && available > 0) {
    throw std::logic_error("pending incidents while an agent is available");
  }
}

std::optional<std::map<AgentId, DepotId>> QueueRebalancePolicy::propose(const Engine& engine,
                                                                        double) {
  const auto avail = engine.available_agents();
  std::map<AgentId, DepotId> assignment;
  if (avail.empty()) return assignment;

  // Depot slots already promised to in-flight rebalancers are off the table.
  const auto reserved = engine.reserved_slots();
  std::vector<Depot> effective;
  effective.reserve(engine.depots().size());
  for (const auto& d : engine.depots()) {
    Depot e = d;
    auto it = reserved.find(d.id);
    if (it != reserved.end()) e.capacity -= it->second;
    if (e.capacity > 0) effective.push_back(e);
  }

  const Occupancy target =
      greedy_place(static_cast<int>(avail.size()), effective, rates_, sm_, engine.grid(),
                   engine.travel(), roi_);
  std::map<AgentId, CellId> positions;
  for (AgentId a : avail) {
    for (const auto& r : engine.state().responders) {
      if (r.id == a) positions[a] = r.position;
    }
  }
  return assign_agents(target, positions, engine.depots(), engine.grid());
}

SimulationResult run_simulation(Engine& engine, RebalancePolicy& policy,
                                const IncidentChain& chain, double rebalance_period_min) {
  if (!(rebalance_period_min > 0.0)) throw std::domain_error("rebalance period must be positive");

  std::vector<double> markers;
  for (int k = 1;; ++k) {
    const double t = chain.start_min + static_cast<double>(k) * rebalance_period_min;
    if (t > chain.end_min + 1e-9) break;
    markers.push_back(t);
  }

  SimulationResult result;
  std::size_t ii = 0, mi = 0;
  while (ii < chain.events.size() || mi < markers.size()) {
    const bool take_incident =
        ii < chain.events.size() &&
        (mi >= markers.size() || chain.events[ii].time_min <= markers[mi]);
    if (take_incident) {
      const auto& ev = chain.events[ii++];
      engine.advance_to(ev.time_min);
      engine.inject_incident(ev);
    } else {
      const double t = markers[mi++];
      engine.advance_to(t);
      auto assignment = policy.propose(engine, t);
      if (assignment) {
        engine.apply_rebalance(*assignment);
        result.rebalance_steps.push_back(t);
      }
    }
  }
  engine.advance_drain();

  result.responses = engine.responses();
  result.rebalances = engine.rebalance_log();
  return result;
}

WorldState initial_world(const std::vector<Depot>& depots, const Occupancy& occ, double t0) {
  WorldState ws;
  ws.time_min = t0;
  std::vector<Depot> ordered = depots;
  std::sort(ordered.begin(), ordered.end(),
            [](const Depot& a, const Depot& b) { return a.id < b.id; });
  AgentId next = 0;
  for (const auto& d : ordered) {
    const int n = occ.at(d.id);
    if (n > d.capacity) throw std::domain_error("initial occupancy exceeds depot capacity");
    for (int k = 0; k < n; ++k) {
      ResponderState r;
      r.id = next++;
      r.position = d.cell;
      r.destination = d.cell;
      r.status = ResponderStatus::AvailableAtDepot;
      r.home_depot = d.id;
      ws.responders.push_back(r);
    }
  }
  return ws;
}

void write_responses_csv(const std::string& path, const std::vector<ResponseRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write responses file: " + path);
  out << "incident_id,t_aware,t_dispatch,t_arrive,response_min,responder_id\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f,%.6f,%d",
                  static_cast<long long>(r.incident_id), r.t_aware, r.t_dispatch, r.t_arrive,
                  r.response_minutes(), r.responder);
    out << buf << '\n';
  }
}

void write_rebalances_csv(const std::string& path, const std::vector<RebalanceEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write rebalances file: " + path);
  out << "step_time,agent_id,miles_moved\n";
  char buf[96];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%.6f,%d,%.6f", e.step_time, e.agent, e.miles);
    out << buf << '\n';
  }
}

}  // namespace erm
