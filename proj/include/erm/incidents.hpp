#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erm/spatial.hpp"

namespace erm {

// Separation applied to coincident event times so the world never holds two
// events at the same instant.
inline constexpr double kEventTimeEpsilonMin = 1e-6;

struct IncidentEvent {
  double time_min = 0.0;
  CellId cell = 0;
  std::int64_t id = 0;
};

// Per-cell homogeneous arrival rates (incidents per minute), indexed by cell.
struct RateMap {
  std::vector<double> rate_per_cell;
  double trained_minutes = 0.0;

  double rate(CellId c) const { return rate_per_cell[static_cast<std::size_t>(c)]; }
  double total_rate() const;
};

// Time-ordered incident sequence over a half-open window [start, end).
struct IncidentChain {
  std::vector<IncidentEvent> events;
  double start_min = 0.0;
  double end_min = 0.0;
};

// Poisson/exponential MLE: events per cell divided by the observation window.
RateMap fit_rates(const std::vector<IncidentEvent>& history, const Grid& grid,
                  double duration_min);

// Independent exponential inter-arrival streams per cell, merged and sorted.
// Ties are separated by kEventTimeEpsilonMin. Deterministic per seed.
IncidentChain sample_chain(const RateMap& rates, double start_min, double horizon_min,
                           std::uint64_t seed);

// Ground-truth events inside [start, start + horizon).
IncidentChain oracle_chain(const std::vector<IncidentEvent>& ground_truth, double start_min,
                           double horizon_min);

// Incident CSV: header `incident_id,time_min,cell_x,cell_y`.
std::vector<IncidentEvent> load_incidents_csv(const std::string& path, const Grid& grid);
void write_incidents_csv(const std::string& path, const std::vector<IncidentEvent>& events,
                         const Grid& grid);

}  // namespace erm
