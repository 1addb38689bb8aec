#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "erm/rng.hpp"
#include "erm/spatial.hpp"

using namespace erm;

TEST_CASE("distance identity and unit neighbors") {
  Grid g{5, 5, 1.0};
  CHECK(distance_miles(7, 7, g) == 0.0);
  CHECK(distance_miles(g.cell_at(1, 2), g.cell_at(2, 2), g) == doctest::Approx(1.0));
}

TEST_CASE("distance is the 3-4-5 hypotenuse") {
  Grid g{5, 5, 1.0};
  CHECK(distance_miles(g.cell_at(0, 0), g.cell_at(3, 4), g) == doctest::Approx(5.0));
}

TEST_CASE("distance scales with cell size and rejects bad cells") {
  Grid g{4, 4, 2.5};
  CHECK(distance_miles(g.cell_at(0, 0), g.cell_at(3, 0), g) == doctest::Approx(7.5));
  CHECK_THROWS_AS(distance_miles(-1, 0, g), std::domain_error);
  CHECK_THROWS_AS(distance_miles(0, 16, g), std::domain_error);
}

TEST_CASE("travel time is distance over speed") {
  Grid g{10, 10, 1.0};
  TravelModel tm{0.5};
  CHECK(travel_minutes(3, 3, g, tm) == 0.0);

  Rng rng(99);
  for (int i = 0; i < 100; ++i) {
    const CellId a = rng.below_int(g.n_cells());
    const CellId b = rng.below_int(g.n_cells());
    CHECK(travel_minutes(a, b, g, tm) ==
          doctest::Approx(distance_miles(a, b, g) / tm.speed_mi_per_min));
  }
  // 5 miles at half a mile per minute
  const double d = distance_miles(g.cell_at(0, 0), g.cell_at(3, 4), g);
  CHECK(d / tm.speed_mi_per_min == doctest::Approx(10.0));
}

TEST_CASE("doubling speed halves travel times exactly") {
  Grid g{8, 6, 1.5};
  TravelModel slow{0.4}, fast{0.8};
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const CellId a = rng.below_int(g.n_cells());
    const CellId b = rng.below_int(g.n_cells());
    CHECK(travel_minutes(a, b, g, slow) == doctest::Approx(2.0 * travel_minutes(a, b, g, fast)));
  }
}

TEST_CASE("triangle inequality over random cell triples") {
  Grid g{12, 9, 1.0};
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const CellId a = rng.below_int(g.n_cells());
    const CellId b = rng.below_int(g.n_cells());
    const CellId c = rng.below_int(g.n_cells());
    CHECK(distance_miles(a, c, g) <= distance_miles(a, b, g) + distance_miles(b, c, g) + 1e-12);
  }
}

TEST_CASE("depot validation") {
  Grid g{3, 3, 1.0};
  CHECK_NOTHROW(validate_depots({{0, 0, 1}, {1, 5, 2}}, g));
  CHECK_THROWS_AS(validate_depots({{0, 0, 0}}, g), std::domain_error);
  CHECK_THROWS_AS(validate_depots({{0, 0, 1}, {1, 0, 1}}, g), std::domain_error);
  CHECK_THROWS_AS(validate_depots({{0, 0, 1}, {0, 5, 1}}, g), std::domain_error);
}
