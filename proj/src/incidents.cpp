#include "erm/incidents.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "erm/rng.hpp"

namespace erm {

double RateMap::total_rate() const {
  double total = 0.0;
  for (double r : rate_per_cell) total += r;
  return total;
}

RateMap fit_rates(const std::vector<IncidentEvent>& history, const Grid& grid,
                  double duration_min) {
  validate_grid(grid);
  if (!(duration_min > 0.0)) throw std::domain_error("fit duration must be positive");
  RateMap rm;
  rm.rate_per_cell.assign(static_cast<std::size_t>(grid.n_cells()), 0.0);
  rm.trained_minutes = duration_min;
  for (const auto& ev : history) {
    grid.require_valid(ev.cell);
    rm.rate_per_cell[static_cast<std::size_t>(ev.cell)] += 1.0;
  }
  for (double& r : rm.rate_per_cell) r /= duration_min;
  return rm;
}

IncidentChain sample_chain(const RateMap& rates, double start_min, double horizon_min,
                           std::uint64_t seed) {
  if (!(horizon_min > 0.0)) throw std::domain_error("sample horizon must be positive");
  IncidentChain chain;
  chain.start_min = start_min;
  chain.end_min = start_min + horizon_min;

  // Per-cell streams get independent derived seeds so the merge is invariant
  // to cell iteration order.
  for (CellId c = 0; c < static_cast<CellId>(rates.rate_per_cell.size()); ++c) {
    const double rate = rates.rate(c);
    if (rate <= 0.0) continue;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    double t = start_min;
    while (true) {
      t += rng.exponential(rate);
      if (t >= chain.end_min) break;
      chain.events.push_back(IncidentEvent{t, c, 0});
    }
  }

  std::sort(chain.events.begin(), chain.events.end(),
            [](const IncidentEvent& a, const IncidentEvent& b) {
              if (a.time_min != b.time_min) return a.time_min < b.time_min;
              return a.cell < b.cell;
            });

  // Separate coincident draws; drop anything an epsilon shift pushes past the
  // window end.
  std::vector<IncidentEvent> cleaned;
  cleaned.reserve(chain.events.size());
  double last = -1.0;
  for (auto ev : chain.events) {
    if (!cleaned.empty() && ev.time_min <= last) ev.time_min = last + kEventTimeEpsilonMin;
    if (ev.time_min >= chain.end_min) continue;
    last = ev.time_min;
    cleaned.push_back(ev);
  }
  chain.events = std::move(cleaned);
  for (std::size_t i = 0; i < chain.events.size(); ++i) {
    chain.events[i].id = static_cast<std::int64_t>(i);
  }
  return chain;
}

IncidentChain oracle_chain(const std::vector<IncidentEvent>& ground_truth, double start_min,
                           double horizon_min) {
  IncidentChain chain;
  chain.start_min = start_min;
  chain.end_min = start_min + horizon_min;
  for (const auto& ev : ground_truth) {
    if (ev.time_min >= chain.start_min && ev.time_min < chain.end_min) {
      chain.events.push_back(ev);
    }
  }
  return chain;
}

std::vector<IncidentEvent> load_incidents_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open incident file: " + path);
  std::vector<IncidentEvent> events;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    const auto id = static_cast<std::int64_t>(std::stoll(tok));
    std::getline(ss, tok, ',');
    const double t = std::stod(tok);
    std::getline(ss, tok, ',');
    const int x = std::stoi(tok);
    if (!std::getline(ss, tok, ',')) throw std::runtime_error("malformed incident row: " + line);
    const int y = std::stoi(tok);
    const CellId cell = grid.cell_at(x, y);
    grid.require_valid(cell);
    events.push_back(IncidentEvent{t, cell, id});
  }
  std::sort(events.begin(), events.end(), [](const IncidentEvent& a, const IncidentEvent& b) {
    if (a.time_min != b.time_min) return a.time_min < b.time_min;
    return a.id < b.id;
  });
  return events;
}

void write_incidents_csv(const std::string& path, const std::vector<IncidentEvent>& events,
                         const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write incident file: " + path);
  out << "incident_id,time_min,cell_x,cell_y\n";
  char buf[64];
  for (const auto& ev : events) {
    std::snprintf(buf, sizeof(buf), "%.6f", ev.time_min);
    out << ev.id << ',' << buf << ',' << grid.cell_x(ev.cell) << ',' << grid.cell_y(ev.cell)
        << '\n';
  }
}

}  // namespace erm
