#include "erm/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erm/assignment.hpp"

namespace erm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Precomputed depot-cell geometry shared by the scoring loop: clamped
// distances for rate inversion plus, per cell, depots ordered by distance.
struct DepotIndex {
  const std::vector<Depot>* depots = nullptr;
  int n_cells = 0;
  double clamp_miles = 0.0;
  std::vector<double> raw;                       // [depot_idx * n_cells + cell]
  std::vector<std::vector<int>> by_distance;     // per cell, depot indices
  std::vector<int> order;                        // depot indices in ascending id

  DepotIndex(const std::vector<Depot>& ds, const Grid& grid) : depots(&ds) {
    n_cells = grid.n_cells();
    clamp_miles = 0.5 * grid.cell_miles;
    raw.resize(ds.size() * static_cast<std::size_t>(n_cells));
    for (std::size_t di = 0; di < ds.size(); ++di) {
      for (CellId g = 0; g < n_cells; ++g) {
        raw[di * static_cast<std::size_t>(n_cells) + static_cast<std::size_t>(g)] =
            distance_miles(ds[di].cell, g, grid);
      }
    }
    by_distance.resize(static_cast<std::size_t>(n_cells));
    for (CellId g = 0; g < n_cells; ++g) {
      auto& v = by_distance[static_cast<std::size_t>(g)];
      v.resize(ds.size());
      for (std::size_t di = 0; di < ds.size(); ++di) v[di] = static_cast<int>(di);
      std::sort(v.begin(), v.end(), [&](int a, int b) {
        const double da = dist(a, g), db = dist(b, g);
        if (da != db) return da < db;
        return ds[static_cast<std::size_t>(a)].id < ds[static_cast<std::size_t>(b)].id;
      });
    }
    order.resize(ds.size());
    for (std::size_t di = 0; di < ds.size(); ++di) order[di] = static_cast<int>(di);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return ds[static_cast<std::size_t>(a)].id < ds[static_cast<std::size_t>(b)].id; });
  }

  double dist(int depot_idx, CellId g) const {
    return raw[static_cast<std::size_t>(depot_idx) * static_cast<std::size_t>(n_cells) +
               static_cast<std::size_t>(g)];
  }
  double clamped(int depot_idx, CellId g) const { return std::max(dist(depot_idx, g), clamp_miles); }
};

// Enumerates, for one cell, the occupied depots that share its rate and each
// depot's share. `counts` is indexed like `index.depots`.
template <typename Fn>
void for_each_share(const DepotIndex& index, const std::vector<int>& counts, CellId g,
                    double cell_rate, double roi_miles, Fn&& fn) {
  const auto& near = index.by_distance[static_cast<std::size_t>(g)];
  double inv_sum = 0.0;
  int n_in_roi = 0;
  for (int di : near) {
    if (index.dist(di, g) > roi_miles) break;
    if (counts[static_cast<std::size_t>(di)] > 0) {
      inv_sum += 1.0 / index.clamped(di, g);
      ++n_in_roi;
    }
  }
  if (n_in_roi > 0) {
    for (int di : near) {
      if (index.dist(di, g) > roi_miles) break;
      if (counts[static_cast<std::size_t>(di)] > 0) {
        fn(di, cell_rate * (1.0 / index.clamped(di, g)) / inv_sum);
      }
    }
    return;
  }
  // No occupied depot in range: the nearest occupied depot takes the whole
  // rate so no demand is dropped.
  for (int di : near) {
    if (counts[static_cast<std::size_t>(di)] > 0) {
      fn(di, cell_rate);
      return;
    }
  }
}

double score_counts(const DepotIndex& index, const std::vector<int>& counts, const RateMap& rates,
                    const ServiceModel& sm, const TravelModel& tm, double roi_miles) {
  double score = 0.0;
  for (CellId g = 0; g < index.n_cells; ++g) {
    const double rate = rates.rate(g);
    if (rate <= 0.0) continue;
    bool saturated = false;
    for_each_share(index, counts, g, rate, roi_miles, [&](int di, double share) {
      if (share <= 0.0) return;
      const int c = counts[static_cast<std::size_t>(di)];
      if (share >= static_cast<double>(c) * sm.mu_per_min) {
        saturated = true;
        return;
      }
      score += response_time_minutes(c, share, sm) +
               index.dist(di, g) / tm.speed_mi_per_min;
    });
    if (saturated) return kInf;
  }
  return score;
}

std::vector<int> counts_from_occupancy(const Occupancy& occ, const std::vector<Depot>& depots) {
  std::vector<int> counts(depots.size(), 0);
  for (const auto& [d, c] : occ.count) {
    if (c < 0) throw std::domain_error("negative occupancy");
    bool found = false;
    for (std::size_t di = 0; di < depots.size(); ++di) {
      if (depots[di].id == d) {
        if (c > depots[di].capacity) throw std::domain_error("occupancy exceeds depot capacity");
        counts[di] = c;
        found = true;
        break;
      }
    }
    if (c > 0 && !found) throw std::domain_error("occupancy references unknown depot");
  }
  return counts;
}

}  // namespace

int Occupancy::total() const {
  int t = 0;
  for (const auto& [d, c] : count) t += c;
  return t;
}

double erlang_wait_factor(int servers, double utilization) {
  if (servers < 1) throw std::domain_error("erlang_wait_factor needs at least one server");
  if (utilization < 0.0) throw std::domain_error("utilization must be nonnegative");
  if (utilization >= 1.0) throw SaturationError("utilization at or above 1");
  if (utilization == 0.0) return 0.0;

  // 1 / (1 + (1 - q) * (c! / (cq)^c) * sum_{k<c} (cq)^k / k!), evaluated via
  // term ratios so factorials never overflow.
  const double a = static_cast<double>(servers) * utilization;  // offered load cq
  double term = 1.0;  // a^k / k!
  double partial = 0.0;
  for (int k = 0; k < servers; ++k) {
    partial += term;
    term *= a / static_cast<double>(k + 1);
  }
  // After the loop, term = a^c / c!.
  const double denom = 1.0 + (1.0 - utilization) * partial / term;
  return 1.0 / denom;
}

double response_time_minutes(int servers, double arrivals_per_min, const ServiceModel& sm) {
  if (servers < 1) throw std::domain_error("response_time needs at least one server");
  if (arrivals_per_min < 0.0) throw std::domain_error("arrival rate must be nonnegative");
  if (!(sm.mu_per_min > 0.0)) throw std::domain_error("service rate must be positive");
  const double capacity = static_cast<double>(servers) * sm.mu_per_min;
  if (arrivals_per_min >= capacity) throw SaturationError("arrival rate at or above c*mu");
  const double q = arrivals_per_min / capacity;
  const double omega = erlang_wait_factor(servers, q);
  return omega / (capacity - arrivals_per_min) + 1.0 / sm.mu_per_min;
}

SplitRates split_rates(const RateMap& rates, const Occupancy& occupied,
                       const std::vector<Depot>& depots, const Grid& grid, double roi_miles) {
  if (!(roi_miles > 0.0)) throw std::domain_error("radius of influence must be positive");
  if (occupied.total() < 1) throw std::domain_error("split_rates needs an occupied depot");
  const DepotIndex index(depots, grid);
  const auto counts = counts_from_occupancy(occupied, depots);

  SplitRates out;
  out.roi_miles = roi_miles;
  for (CellId g = 0; g < index.n_cells; ++g) {
    const double rate = rates.rate(g);
    if (rate <= 0.0) continue;
    for_each_share(index, counts, g, rate, roi_miles, [&](int di, double share) {
      out.share[{depots[static_cast<std::size_t>(di)].id, g}] = share;
    });
  }
  return out;
}

double allocation_score(const Occupancy& occ, const RateMap& rates, const ServiceModel& sm,
                        const std::vector<Depot>& depots, const Grid& grid,
                        const TravelModel& tm, double roi_miles) {
  if (occ.total() < 1) throw std::domain_error("allocation_score needs a placed agent");
  const DepotIndex index(depots, grid);
  const auto counts = counts_from_occupancy(occ, depots);
  return score_counts(index, counts, rates, sm, tm, roi_miles);
}

Occupancy greedy_place(int n_agents, const std::vector<Depot>& depots, const RateMap& rates,
                       const ServiceModel& sm, const Grid& grid, const TravelModel& tm,
                       double roi_miles, std::vector<DepotId>* commit_trace) {
  if (n_agents < 1) throw std::domain_error("greedy_place needs at least one agent");
  if (total_capacity(depots) < n_agents) {
    throw std::domain_error("total depot capacity below fleet size");
  }
  const DepotIndex index(depots, grid);
  std::vector<int> counts(depots.size(), 0);

  for (int placed = 0; placed < n_agents; ++placed) {
    int best_di = -1;
    double best_score = kInf;
    for (int di : index.order) {
      const auto& d = depots[static_cast<std::size_t>(di)];
      if (counts[static_cast<std::size_t>(di)] >= d.capacity) continue;
      ++counts[static_cast<std::size_t>(di)];
      const double score = score_counts(index, counts, rates, sm, tm, roi_miles);
      --counts[static_cast<std::size_t>(di)];
      if (best_di < 0 || score < best_score) {
        best_di = di;
        best_score = score;
      }
    }
    ++counts[static_cast<std::size_t>(best_di)];
    if (commit_trace) commit_trace->push_back(depots[static_cast<std::size_t>(best_di)].id);
  }

  Occupancy occ;
  for (std::size_t di = 0; di < depots.size(); ++di) {
    if (counts[di] > 0) occ.count[depots[di].id] = counts[di];
  }
  return occ;
}

std::map<AgentId, DepotId> assign_agents(const Occupancy& target,
                                         const std::map<AgentId, CellId>& agent_positions,
                                         const std::vector<Depot>& depots, const Grid& grid) {
  if (target.total() != static_cast<int>(agent_positions.size())) {
    throw std::domain_error("assign_agents: slot count does not match agent count");
  }
  std::vector<AgentId> agents;
  agents.reserve(agent_positions.size());
  for (const auto& [a, pos] : agent_positions) {
    grid.require_valid(pos);
    agents.push_back(a);
  }
  std::vector<std::pair<DepotId, CellId>> slots;  // one entry per open slot
  for (const auto& [d, c] : target.count) {
    const Depot* depot = nullptr;
    for (const auto& cand : depots) {
      if (cand.id == d) {
        depot = &cand;
        break;
      }
    }
    if (depot == nullptr) throw std::domain_error("assign_agents: unknown depot in target");
    if (c > depot->capacity) throw std::domain_error("assign_agents: target exceeds capacity");
    for (int k = 0; k < c; ++k) slots.emplace_back(d, depot->cell);
  }

  std::vector<std::vector<double>> cost(agents.size(), std::vector<double>(slots.size(), 0.0));
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const CellId pos = agent_positions.at(agents[i]);
    for (std::size_t j = 0; j < slots.size(); ++j) {
      cost[i][j] = distance_miles(pos, slots[j].second, grid);
    }
  }
  const auto cols = min_cost_assignment(cost);
  std::map<AgentId, DepotId> out;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    out[agents[i]] = slots[static_cast<std::size_t>(cols[i])].first;
  }
  return out;
}

double placement_permutations(int n_depots, int n_agents) {
  if (n_agents < 0 || n_depots < 0) throw std::domain_error("counts must be nonnegative");
  if (n_agents > n_depots) return 0.0;
  double p = 1.0;
  for (int k = 0; k < n_agents; ++k) p *= static_cast<double>(n_depots - k);
  return p;
}

}  // namespace erm
