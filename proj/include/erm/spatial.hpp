#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erm {

using CellId = std::int32_t;
using DepotId = std::int32_t;
using AgentId = std::int32_t;

// Square-cell service area. Cells are indexed row-major: id = y * width + x.
// All distances are Euclidean miles between cell centroids.
struct Grid {
  int width = 1;
  int height = 1;
  double cell_miles = 1.0;

  int n_cells() const { return width * height; }
  bool valid(CellId c) const { return c >= 0 && c < n_cells(); }
  int cell_x(CellId c) const { return c % width; }
  int cell_y(CellId c) const { return c / width; }
  CellId cell_at(int x, int y) const { return static_cast<CellId>(y * width + x); }
  double centroid_x(CellId c) const { return (cell_x(c) + 0.5) * cell_miles; }
  double centroid_y(CellId c) const { return (cell_y(c) + 0.5) * cell_miles; }

  void require_valid(CellId c) const;  // throws std::domain_error
};

void validate_grid(const Grid& g);

// A fixed waiting location for idle responders.
struct Depot {
  DepotId id = 0;
  CellId cell = 0;
  int capacity = 1;
};

// Euclidean router with a single fleet-wide speed.
struct TravelModel {
  double speed_mi_per_min = 0.5;
};

double distance_miles(CellId a, CellId b, const Grid& g);
double travel_minutes(CellId a, CellId b, const Grid& g, const TravelModel& tm);

// Depot CSV: header `depot_id,cell_x,cell_y,capacity`.
std::vector<Depot> load_depots_csv(const std::string& path, const Grid& grid);
void write_depots_csv(const std::string& path, const std::vector<Depot>& depots, const Grid& grid);

// Distinct cells per depot id, capacity >= 1, cells inside the grid.
void validate_depots(const std::vector<Depot>& depots, const Grid& grid);

int total_capacity(const std::vector<Depot>& depots);

}  // namespace erm
