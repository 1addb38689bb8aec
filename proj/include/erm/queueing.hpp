#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "erm/incidents.hpp"
#include "erm/spatial.hpp"

namespace erm {

// Service-completion rate per responder. Configs give a mean service time in
// minutes; the formulas need a rate, so conversion happens here.
struct ServiceModel {
  double mu_per_min = 0.05;

  static ServiceModel from_mean_minutes(double mean_minutes) {
    if (!(mean_minutes > 0.0)) throw std::domain_error("mean service time must be positive");
    return ServiceModel{1.0 / mean_minutes};
  }
};

// Thrown when an M/M/c queue is given an arrival rate at or beyond capacity.
class SaturationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Erlang-C waiting probability for c servers at utilization q = rate/(c*mu).
// Defined as 0 at q = 0 by continuity.
double erlang_wait_factor(int servers, double utilization);

// Expected M/M/c sojourn (wait + service) in minutes:
// omega / (c*mu - rate) + 1/mu. Throws SaturationError when rate >= c*mu.
double response_time_minutes(int servers, double arrivals_per_min, const ServiceModel& sm);

// Count of responders stationed per depot.
struct Occupancy {
  std::map<DepotId, int> count;

  int at(DepotId d) const {
    auto it = count.find(d);
    return it == count.end() ? 0 : it->second;
  }
  int total() const;
};

// Per (depot, cell) share of each cell's arrival rate. Shares are inversely
// proportional to depot-cell distance among occupied depots within the
// radius of influence; a cell with no occupied depot in range is assigned in
// full to the nearest occupied depot.
struct SplitRates {
  std::map<std::pair<DepotId, CellId>, double> share;
  double roi_miles = 0.0;

  double share_of(DepotId d, CellId g) const {
    auto it = share.find({d, g});
    return it == share.end() ? 0.0 : it->second;
  }
};

SplitRates split_rates(const RateMap& rates, const Occupancy& occupied,
                       const std::vector<Depot>& depots, const Grid& grid, double roi_miles);

// Allocation heuristic score: sum over occupied depots and their served
// cells of expected queue response time plus travel time. Saturated shares
// make the allocation infeasible (+infinity), not an error.
double allocation_score(const Occupancy& occ, const RateMap& rates, const ServiceModel& sm,
                        const std::vector<Depot>& depots, const Grid& grid,
                        const TravelModel& tm, double roi_miles);

// Iterative greedy placement: each round tentatively adds one responder to
// every under-capacity depot and commits the depot minimizing the allocation
// score (ties: lowest depot id). `commit_trace`, when given, receives the
// depot ids in commit order.
Occupancy greedy_place(int n_agents, const std::vector<Depot>& depots, const RateMap& rates,
                       const ServiceModel& sm, const Grid& grid, const TravelModel& tm,
                       double roi_miles, std::vector<DepotId>* commit_trace = nullptr);

// Distance-minimizing matching of agents to the slots of a target occupancy.
std::map<AgentId, DepotId> assign_agents(const Occupancy& target,
                                         const std::map<AgentId, CellId>& agent_positions,
                                         const std::vector<Depot>& depots, const Grid& grid);

// Number of distinct placements of n_agents across single-slot depots,
// |D|! / (|D| - |L|)!, as a double (overflows 64-bit integers quickly).
double placement_permutations(int n_depots, int n_agents);

}  // namespace erm
