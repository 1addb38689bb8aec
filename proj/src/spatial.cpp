#include "erm/spatial.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace erm {

void Grid::require_valid(CellId c) const {
  if (!valid(c)) {
    throw std::domain_error("cell id " + std::to_string(c) + " outside grid of " +
                            std::to_string(n_cells()) + " cells");
  }
}

void validate_grid(const Grid& g) {
  if (g.width < 1 || g.height < 1) throw std::domain_error("grid dimensions must be >= 1");
  if (!(g.cell_miles > 0.0)) throw std::domain_error("grid cell size must be positive");
}

double distance_miles(CellId a, CellId b, const Grid& g) {
  g.require_valid(a);
  g.require_valid(b);
  const double dx = g.centroid_x(a) - g.centroid_x(b);
  const double dy = g.centroid_y(a) - g.centroid_y(b);
  return std::hypot(dx, dy);
}

double travel_minutes(CellId a, CellId b, const Grid& g, const TravelModel& tm) {
  if (!(tm.speed_mi_per_min > 0.0)) throw std::domain_error("travel speed must be positive");
  return distance_miles(a, b, g) / tm.speed_mi_per_min;
}

std::vector<Depot> load_depots_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open depot file: " + path);
  std::vector<Depot> depots;
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
    long vals[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ss, tok, ',')) throw std::runtime_error("malformed depot row: " + line);
      vals[i] = std::stol(tok);
    }
    Depot d;
    d.id = static_cast<DepotId>(vals[0]);
    d.cell = grid.cell_at(static_cast<int>(vals[1]), static_cast<int>(vals[2]));
    d.capacity = static_cast<int>(vals[3]);
    depots.push_back(d);
  }
  validate_depots(depots, grid);
  return depots;
}

void write_depots_csv(const std::string& path, const std::vector<Depot>& depots, const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write depot file: " + path);
  out << "depot_id,cell_x,cell_y,capacity\n";
  for (const auto& d : depots) {
    out << d.id << ',' << grid.cell_x(d.cell) << ',' << grid.cell_y(d.cell) << ',' << d.capacity
        << '\n';
  }
}

void validate_depots(const std::vector<Depot>& depots, const Grid& grid) {
  std::set<DepotId> ids;
  std::set<CellId> cells;
  for (const auto& d : depots) {
    grid.require_valid(d.cell);
    if (d.capacity < 1) throw std::domain_error("depot capacity must be >= 1");
    if (!ids.insert(d.id).second) throw std::domain_error("duplicate depot id");
    if (!cells.insert(d.cell).second) throw std::domain_error("duplicate depot cell");
  }
}

int total_capacity(const std::vector<Depot>& depots) {
  int total = 0;
  for (const auto& d : depots) total += d.capacity;
  return total;
}

}  // namespace erm
