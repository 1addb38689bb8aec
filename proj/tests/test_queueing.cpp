#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "erm/assignment.hpp"
#include "erm/queueing.hpp"
#include "erm/rng.hpp"

using namespace erm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Textbook Erlang-C in the classic numerator/denominator form, evaluated
// with explicit factorials. Independent of the production code path, which
// uses the inverted closed form.
double erlang_c_reference(int c, double offered_load) {
  const double a = offered_load;
  double fact = 1.0;
  double sum = 0.0;
  for (int k = 0; k < c; ++k) {
    if (k > 0) fact *= k;
    sum += std::pow(a, k) / fact;
  }
  fact *= c;
  const double top = std::pow(a, c) / fact;
  return top / (top + (1.0 - a / c) * sum);
}

double response_time_reference(int c, double lambda, double mu) {
  if (lambda >= c * mu) return kInf;
  const double omega = lambda == 0.0 ? 0.0 : erlang_c_reference(c, lambda / mu);
  return omega / (c * mu - lambda) + 1.0 / mu;
}

std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (int c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct ReplayOracle {
  const std::vector<Depot>& depots;
  const RateMap& rates;
  double mu;
  const Grid& grid;
  double speed;
  double roi;

  double clamped(const Depot& d, CellId g) const {
    return std::max(distance_miles(d.cell, g, grid), 0.5 * grid.cell_miles);
  }

  // Occupied depots sharing cell g: in-RoI ones, else the nearest occupied.
  std::vector<int> sharing(const std::map<DepotId, int>& occ, CellId g) const {
    std::vector<int> in_roi;
    int nearest = -1;
    double nearest_d = kInf;
    for (std::size_t i = 0; i < depots.size(); ++i) {
      if (occ.count(depots[i].id) == 0 || occ.at(depots[i].id) == 0) continue;
      const double d = distance_miles(depots[i].cell, g, grid);
      if (d <= roi) in_roi.push_back(static_cast<int>(i));
      if (d < nearest_d ||
          (d == nearest_d && (nearest < 0 || depots[i].id < depots[static_cast<std::size_t>(nearest)].id))) {
        nearest_d = d;
        nearest = static_cast<int>(i);
      }
    }
    if (!in_roi.empty()) return in_roi;
    if (nearest >= 0) return {nearest};
    return {};
  }

  // Shares via the linear system: conservation plus pairwise
  // distance-weighted equality against the closest sharing depot.
  std::vector<double> shares(const std::vector<int>& ds, CellId g, double cell_rate) const {
    const int k = static_cast<int>(ds.size());
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    std::vector<double> b(k, 0.0);
    for (int j = 0; j < k; ++j) a[0][j] = 1.0;
    b[0] = cell_rate;
    for (int i = 1; i < k; ++i) {
      a[i][0] = clamped(depots[static_cast<std::size_t>(ds[0])], g);
      a[i][i] = -clamped(depots[static_cast<std::size_t>(ds[i])], g);
    }
    return solve_linear(a, b);
  }

  double score(const std::map<DepotId, int>& occ) const {
    double total = 0.0;
    for (CellId g = 0; g < grid.n_cells(); ++g) {
      const double rate = rates.rate(g);
      if (rate <= 0.0) continue;
      const auto ds = sharing(occ, g);
      const auto xs = shares(ds, g, rate);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (xs[i] <= 0.0) continue;
        const auto& d = depots[static_cast<std::size_t>(ds[i])];
        const double rt = response_time_reference(occ.at(d.id), xs[i], mu);
        if (rt == kInf) return kInf;
        total += rt + distance_miles(d.cell, g, grid) / speed;
      }
    }
    return total;
  }

  std::vector<DepotId> replay(int n_agents) const {
    std::map<DepotId, int> occ;
    std::vector<DepotId> commits;
    std::vector<const Depot*> by_id;
    for (const auto& d : depots) by_id.push_back(&d);
    std::sort(by_id.begin(), by_id.end(),
              [](const Depot* a, const Depot* b) { return a->id < b->id; });
    for (int step = 0; step < n_agents; ++step) {
      DepotId best = -1;
      double best_score = kInf;
      for (const Depot* d : by_id) {
        if (occ[d->id] >= d->capacity) continue;
        ++occ[d->id];
        const double s = score(occ);
        --occ[d->id];
        if (best < 0 || s < best_score) {
          best = d->id;
          best_score = s;
        }
      }
      ++occ[best];
      commits.push_back(best);
    }
    return commits;
  }
};

}  // namespace

TEST_CASE("erlang_wait_factor closed form matches hand values") {
  CHECK(erlang_wait_factor(1, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(erlang_wait_factor(1, 0.0) == 0.0);
  CHECK(erlang_wait_factor(5, 0.0) == 0.0);
  // c=2, upsilon=1, mu=1 -> q=0.5 -> 1/3
  CHECK(erlang_wait_factor(2, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(erlang_wait_factor(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(erlang_wait_factor(2, 1.0), SaturationError);
}

TEST_CASE("erlang_wait_factor equals the textbook Erlang-C across c and q") {
  for (int c = 1; c <= 10; ++c) {
    for (double q = 0.05; q < 1.0; q += 0.05) {
      const double ours = erlang_wait_factor(c, q);
      const double ref = erlang_c_reference(c, c * q);
      CHECK(std::abs(ours - ref) < 1e-12);
      CHECK(ours >= 0.0);
      CHECK(ours <= 1.0);
    }
  }
}

TEST_CASE("erlang_wait_factor monotonicity") {
  for (int c = 1; c <= 6; ++c) {
    double prev = -1.0;
    for (double q = 0.0; q < 0.99; q += 0.01) {
      const double w = erlang_wait_factor(c, q);
      CHECK(w >= prev);
      prev = w;
    }
  }
}

TEST_CASE("response_time closed forms") {
  const ServiceModel mu1{1.0};
  CHECK(response_time_minutes(1, 0.5, mu1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(response_time_minutes(1, 0.0, mu1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(response_time_minutes(2, 1.0, mu1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(response_time_minutes(1, 1.0, mu1), SaturationError);

  // M/M/1 sojourn is 1/(mu - lambda).
  for (int i = 1; i < 50; ++i) {
    const double lambda = 0.019 * i;
    CHECK(std::abs(response_time_minutes(1, lambda, mu1) - 1.0 / (1.0 - lambda)) < 1e-12);
  }
}

TEST_CASE("response_time strictly decreases with more servers") {
  const ServiceModel sm{0.5};
  for (double lam : {0.1, 0.3, 0.45}) {
    double prev = kInf;
    for (int c = 1; c <= 8; ++c) {
      const double rt = response_time_minutes(c, lam, sm);
      CHECK(rt < prev);
      prev = rt;
    }
    CHECK(prev >= 1.0 / sm.mu_per_min);
  }
}

TEST_CASE("split_rates solves the two-depot case") {
  // Cell at x=0; depots 1 and 2 miles away; rate 3 -> shares 2 and 1.
  Grid g{4, 1, 1.0};
  RateMap rates;
  rates.rate_per_cell = {3.0, 0.0, 0.0, 0.0};
  std::vector<Depot> depots = {{0, 1, 5}, {1, 2, 5}};
  Occupancy occ;
  occ.count = {{0, 1}, {1, 1}};
  const auto split = split_rates(rates, occ, depots, g, 10.0);
  CHECK(split.share_of(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(split.share_of(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split_rates single depot takes everything") {
  Grid g{3, 1, 1.0};
  RateMap rates;
  rates.rate_per_cell = {0.7, 0.0, 1.1};
  std::vector<Depot> depots = {{0, 1, 2}, {1, 2, 2}};
  Occupancy occ;
  occ.count = {{0, 1}};
  const auto split = split_rates(rates, occ, depots, g, 10.0);
  CHECK(split.share_of(0, 0) == doctest::Approx(0.7));
  CHECK(split.share_of(0, 2) == doctest::Approx(1.1));
  CHECK(split.share_of(1, 2) == 0.0);
}

TEST_CASE("split_rates honors the radius of influence") {
  // Depot A 1 mile away (inside roi 3), depot B 5 miles away (outside).
  Grid g{7, 1, 1.0};
  RateMap rates;
  rates.rate_per_cell.assign(7, 0.0);
  rates.rate_per_cell[0] = 4.0;
  std::vector<Depot> depots = {{0, 1, 3}, {1, 5, 3}};
  Occupancy occ;
  occ.count = {{0, 1}, {1, 1}};
  const auto split = split_rates(rates, occ, depots, g, 3.0);
  CHECK(split.share_of(0, 0) == doctest::Approx(4.0));
  CHECK(split.share_of(1, 0) == 0.0);
}

TEST_CASE("split_rates falls back to the nearest occupied depot") {
  Grid g{10, 1, 1.0};
  RateMap rates;
  rates.rate_per_cell.assign(10, 0.0);
  rates.rate_per_cell[0] = 2.0;
  std::vector<Depot> depots = {{0, 9, 1}, {1, 6, 1}};
  Occupancy occ;
  occ.count = {{0, 1}, {1, 1}};
  const auto split = split_rates(rates, occ, depots, g, 2.0);  // nobody in range
  CHECK(split.share_of(1, 0) == doctest::Approx(2.0));
  CHECK(split.share_of(0, 0) == 0.0);
}

TEST_CASE("split_rates conservation and inverse proportionality on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 2 + rng.below_int(6);
    const int h = 2 + rng.below_int(6);
    Grid g{w, h, 0.5 + rng.uniform01()};
    const int n_depots = 1 + rng.below_int(5);
    std::vector<Depot> depots;
    std::vector<char> used(static_cast<std::size_t>(g.n_cells()), 0);
    for (int i = 0; i < n_depots; ++i) {
      CellId c = rng.below_int(g.n_cells());
      while (used[static_cast<std::size_t>(c)]) c = (c + 1) % g.n_cells();
      used[static_cast<std::size_t>(c)] = 1;
      depots.push_back({i, c, 1 + rng.below_int(3)});
    }
    Occupancy occ;
    int total = 0;
    for (const auto& d : depots) {
      const int n = rng.below_int(d.capacity + 1);
      if (n > 0) occ.count[d.id] = n;
      total += n;
    }
    if (total == 0) occ.count[depots[0].id] = 1;

    RateMap rates;
    rates.rate_per_cell.resize(static_cast<std::size_t>(g.n_cells()));
    for (auto& r : rates.rate_per_cell) r = rng.uniform01() < 0.3 ? rng.uniform(0.0, 2.0) : 0.0;

    const double roi = 0.5 + 4.0 * rng.uniform01();
    const auto split = split_rates(rates, occ, depots, g, roi);

    // Eq 2a: per-cell conservation.
    for (CellId c = 0; c < g.n_cells(); ++c) {
      if (rates.rate(c) <= 0.0) continue;
      double sum = 0.0;
      for (const auto& d : depots) sum += split.share_of(d.id, c);
      CHECK(std::abs(sum - rates.rate(c)) <= 1e-9 * rates.rate(c));
    }
    // Eq 2b: distance-weighted equality among in-RoI occupied depots.
    for (CellId c = 0; c < g.n_cells(); ++c) {
      if (rates.rate(c) <= 0.0) continue;
      std::vector<double> products;
      for (const auto& d : depots) {
        if (occ.at(d.id) == 0) continue;
        if (distance_miles(d.cell, c, g) > roi) continue;
        const double clamped = std::max(distance_miles(d.cell, c, g), 0.5 * g.cell_miles);
        products.push_back(clamped * split.share_of(d.id, c));
      }
      for (std::size_t i = 1; i < products.size(); ++i) {
        CHECK(std::abs(products[i] - products[0]) <= 1e-9 * std::max(1.0, products[0]));
      }
    }
  }
}

TEST_CASE("allocation_score by direct substitution") {
  // One depot, one cell with share 0.5/min, mu=1/min, travel 0.25 min.
  Grid g{2, 1, 1.0};
  std::vector<Depot> depots = {{0, 0, 1}};
  RateMap rates;
  rates.rate_per_cell = {0.0, 0.5};
  Occupancy occ;
  occ.count = {{0, 1}};
  const ServiceModel mu1{1.0};
  const TravelModel fast{4.0};  // 1 mile / 4 mpm = 0.25 min
  CHECK(allocation_score(occ, rates, mu1, depots, g, fast, 5.0) ==
        doctest::Approx(2.25).epsilon(1e-12));

  RateMap zero;
  zero.rate_per_cell = {0.0, 0.0};
  CHECK(allocation_score(occ, zero, mu1, depots, g, fast, 5.0) == 0.0);

  RateMap saturating;
  saturating.rate_per_cell = {0.0, 2.0};
  CHECK(allocation_score(occ, saturating, mu1, depots, g, fast, 5.0) == kInf);
}

TEST_CASE("greedy_place dominant depot and forced split") {
  Grid g{5, 1, 1.0};
  RateMap rates;
  rates.rate_per_cell = {0.4, 0.0, 0.0, 0.0, 0.0};
  std::vector<Depot> depots = {{0, 1, 2}, {1, 4, 2}};
  const ServiceModel sm{1.0};
  const TravelModel tm{1.0};

  const auto one = greedy_place(1, depots, rates, sm, g, tm, 10.0);
  CHECK(one.at(0) == 1);
  CHECK(one.at(1) == 0);

  std::vector<Depot> unit = {{0, 1, 1}, {1, 4, 1}};
  const auto two = greedy_place(2, unit, rates, sm, g, tm, 10.0);
  CHECK(two.at(0) == 1);
  CHECK(two.at(1) == 1);

  CHECK_THROWS_AS(greedy_place(3, unit, rates, sm, g, tm, 10.0), std::domain_error);
}

TEST_CASE("greedy_place matches the naive replay of the iterative greedy") {
  Rng rng(31337);
  for (int trial = 0; trial < 12; ++trial) {
    Grid g{3, 3, 1.0};
    std::vector<Depot> depots = {{0, 0, 1}, {1, 2, 1}, {2, 6, 1}, {3, 8, 1}};
    RateMap rates;
    rates.rate_per_cell.resize(9);
    for (auto& r : rates.rate_per_cell) r = rng.uniform(0.0, 0.01);
    const ServiceModel sm = ServiceModel::from_mean_minutes(20.0);
    const TravelModel tm{0.5};
    const double roi = 1.0 + rng.uniform(0.0, 3.0);

    std::vector<DepotId> trace;
    greedy_place(2, depots, rates, sm, g, tm, roi, &trace);

    const ReplayOracle oracle{depots, rates, sm.mu_per_min, g, tm.speed_mi_per_min, roi};
    const auto expected = oracle.replay(2);
    REQUIRE(trace.size() == expected.size());
    for (std::size_t i = 0; i < trace.size(); ++i) CHECK(trace[i] == expected[i]);
  }
}

TEST_CASE("greedy_place respects capacities and places everyone") {
  Rng rng(555);
  Grid g{6, 6, 1.0};
  std::vector<Depot> depots;
  for (int i = 0; i < 8; ++i) depots.push_back({i, static_cast<CellId>(i * 4 + 2), 2});
  RateMap rates;
  rates.rate_per_cell.resize(36);
  for (auto& r : rates.rate_per_cell) r = rng.uniform(0.0, 0.005);
  const ServiceModel sm = ServiceModel::from_mean_minutes(20.0);
  const auto occ = greedy_place(11, depots, rates, sm, g, TravelModel{0.5}, 3.0);
  CHECK(occ.total() == 11);
  for (const auto& [d, n] : occ.count) {
    CHECK(n >= 0);
    CHECK(n <= 2);
  }
}

TEST_CASE("assign_agents identity and crossing cases") {
  Grid g{10, 1, 1.0};
  std::vector<Depot> depots = {{0, 2, 1}, {1, 7, 1}};
  Occupancy target;
  target.count = {{0, 1}, {1, 1}};

  std::map<AgentId, CellId> at_home = {{0, 2}, {1, 7}};
  const auto id_map = assign_agents(target, at_home, depots, g);
  CHECK(id_map.at(0) == 0);
  CHECK(id_map.at(1) == 1);

  // Crossing costs: agent 0 close to depot 0, agent 1 close to depot 1.
  std::map<AgentId, CellId> crossing = {{0, 1}, {1, 8}};
  const auto cross_map = assign_agents(target, crossing, depots, g);
  CHECK(cross_map.at(0) == 0);
  CHECK(cross_map.at(1) == 1);

  std::map<AgentId, CellId> too_few = {{0, 1}};
  CHECK_THROWS_AS(assign_agents(target, too_few, depots, g), std::domain_error);
}

TEST_CASE("assign_agents matches brute force on 5-agent instances") {
  Rng rng(808);
  Grid g{8, 8, 1.0};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Depot> depots;
    std::vector<char> used(64, 0);
    for (int i = 0; i < 5; ++i) {
      CellId c = rng.below_int(64);
      while (used[static_cast<std::size_t>(c)]) c = (c + 1) % 64;
      used[static_cast<std::size_t>(c)] = 1;
      depots.push_back({i, c, 1});
    }
    Occupancy target;
    for (int i = 0; i < 5; ++i) target.count[i] = 1;
    std::map<AgentId, CellId> pos;
    for (int a = 0; a < 5; ++a) pos[a] = rng.below_int(64);

    const auto got = assign_agents(target, pos, depots, g);
    double got_cost = 0.0;
    for (const auto& [agent, depot] : got) {
      got_cost += distance_miles(pos[agent], depots[static_cast<std::size_t>(depot)].cell, g);
    }

    std::vector<int> perm = {0, 1, 2, 3, 4};
    double best = kInf;
    do {
      double cost = 0.0;
      for (int a = 0; a < 5; ++a) {
        cost += distance_miles(pos[a], depots[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])].cell, g);
      }
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));

    CHECK(got_cost == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("placement_permutations reproduces the worked example") {
  // 30 depots, 20 responders: 30!/10!.
  const double p = placement_permutations(30, 20);
  CHECK(p == doctest::Approx(7.31e25).epsilon(0.005));
  CHECK(placement_permutations(5, 0) == 1.0);
  CHECK(placement_permutations(3, 4) == 0.0);
}
