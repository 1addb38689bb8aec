#include "erm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace erm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::None: return "none";
    case PolicyKind::Queue: return "queue";
    case PolicyKind::Mcts: return "mcts";
  }
  return "none";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json stats_to_json(const SummaryStats& s) {
  return json{{"count", s.count},   {"mean", s.mean}, {"variance", s.variance},
              {"min", s.min},       {"q1", s.q1},     {"median", s.median},
              {"q3", s.q3},         {"max", s.max}};
}

SummaryStats stats_from_json(const json& j) {
  SummaryStats s;
  s.count = j.at("count").get<std::size_t>();
  s.mean = j.at("mean").get<double>();
  s.variance = j.at("variance").get<double>();
  s.min = j.at("min").get<double>();
  s.q1 = j.at("q1").get<double>();
  s.median = j.at("median").get<double>();
  s.q3 = j.at("q3").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

}  // namespace

ExperimentConfig experiment_from_config(const KeyValueConfig& kv,
                                        std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  cfg.id = kv.get_string("experiment.id", cfg.id);

  const std::string policy = kv.get_string("experiment.policy", policy_name(cfg.policy));
  if (policy == "none") {
    cfg.policy = PolicyKind::None;
  } else if (policy == "queue") {
    cfg.policy = PolicyKind::Queue;
  } else if (policy == "mcts") {
    cfg.policy = PolicyKind::Mcts;
  } else {
    errors.push_back("experiment.policy: expected none|queue|mcts, got '" + policy + "'");
  }
  cfg.seeds = kv.get_seed_list("experiment.seeds", cfg.seeds, errors);

  cfg.grid.width = kv.get_int("grid.width", cfg.grid.width, errors);
  cfg.grid.height = kv.get_int("grid.height", cfg.grid.height, errors);
  cfg.grid.cell_miles = kv.get_double("grid.cell_miles", cfg.grid.cell_miles, errors);
  if (cfg.grid.width < 1) errors.push_back("grid.width: must be >= 1");
  if (cfg.grid.height < 1) errors.push_back("grid.height: must be >= 1");
  if (!(cfg.grid.cell_miles > 0.0)) errors.push_back("grid.cell_miles: must be positive");

  cfg.tm.speed_mi_per_min = kv.get_double("travel.speed_mi_per_min", cfg.tm.speed_mi_per_min, errors);
  if (!(cfg.tm.speed_mi_per_min > 0.0)) errors.push_back("travel.speed_mi_per_min: must be positive");

  cfg.fleet = kv.get_int("fleet.size", cfg.fleet, errors);
  if (cfg.fleet < 1) errors.push_back("fleet.size: must be >= 1");
  cfg.initial_placement = kv.get_string("fleet.initial", cfg.initial_placement);
  if (cfg.initial_placement != "greedy" && cfg.initial_placement != "first_depots") {
    errors.push_back("fleet.initial: expected greedy|first_depots");
  }

  cfg.depot_file = kv.get_string("depots.file", cfg.depot_file);
  if (!cfg.depot_file.empty() && !fs::exists(cfg.depot_file)) {
    errors.push_back("depots.file: path does not exist: " + cfg.depot_file);
  }
  cfg.auto_depot_count = kv.get_int("depots.auto_count", cfg.auto_depot_count, errors);
  cfg.depot_seed = static_cast<std::uint64_t>(
      kv.get_int("depots.seed", static_cast<int>(cfg.depot_seed), errors));

  cfg.incident_csv = kv.get_string("incidents.csv", cfg.incident_csv);
  if (!cfg.incident_csv.empty() && !fs::exists(cfg.incident_csv)) {
    errors.push_back("incidents.csv: path does not exist: " + cfg.incident_csv);
  }
  cfg.synthetic.hotspots = kv.get_int("synthetic.hotspots", cfg.synthetic.hotspots, errors);
  cfg.synthetic.base_rate = kv.get_double("synthetic.base_rate", cfg.synthetic.base_rate, errors);
  cfg.synthetic.hotspot_rate =
      kv.get_double("synthetic.hotspot_rate", cfg.synthetic.hotspot_rate, errors);
  cfg.synthetic.duration_min =
      kv.get_double("synthetic.duration_min", cfg.synthetic.duration_min, errors);

  cfg.train_minutes = kv.get_double("split.train_minutes", cfg.train_minutes, errors);
  cfg.eval_minutes = kv.get_double("split.eval_minutes", cfg.eval_minutes, errors);
  if (!(cfg.train_minutes > 0.0)) errors.push_back("split.train_minutes: must be positive");
  if (!(cfg.eval_minutes > 0.0)) errors.push_back("split.eval_minutes: must be positive");

  cfg.service_minutes = kv.get_double("service.minutes", cfg.service_minutes, errors);
  if (!(cfg.service_minutes > 0.0)) errors.push_back("service.minutes: must be positive");
  const std::string dist = kv.get_string("service.distribution", cfg.service_exponential
                                                                     ? "exponential"
                                                                     : "constant");
  if (dist == "constant") {
    cfg.service_exponential = false;
  } else if (dist == "exponential") {
    cfg.service_exponential = true;
  } else {
    errors.push_back("service.distribution: expected constant|exponential");
  }

  cfg.rebalance_period_min =
      kv.get_double("rebalance.period_min", cfg.rebalance_period_min, errors);
  if (!(cfg.rebalance_period_min > 0.0)) errors.push_back("rebalance.period_min: must be positive");

  cfg.queue_roi = kv.get_double("queue.roi", cfg.queue_roi, errors);
  if (!(cfg.queue_roi > 0.0)) errors.push_back("queue.roi: must be positive");

  cfg.planner.iteration_limit = kv.get_int("mcts.iterations", cfg.planner.iteration_limit, errors);
  cfg.planner.horizon_min = kv.get_double("mcts.horizon_min", cfg.planner.horizon_min, errors);
  cfg.planner.psi = kv.get_double("mcts.psi", cfg.planner.psi, errors);
  cfg.planner.alpha_per_second = kv.get_double("mcts.alpha", cfg.planner.alpha_per_second, errors);
  cfg.planner.n_chains = kv.get_int("mcts.chains", cfg.planner.n_chains, errors);
  cfg.planner.ucb_c = kv.get_double("mcts.ucb_c", cfg.planner.ucb_c, errors);
  if (cfg.planner.iteration_limit < 1) errors.push_back("mcts.iterations: must be >= 1");
  if (cfg.planner.n_chains < 1) errors.push_back("mcts.chains: must be >= 1");
  if (!(cfg.planner.alpha_per_second > 0.0) || cfg.planner.alpha_per_second > 1.0) {
    errors.push_back("mcts.alpha: must be in (0, 1]");
  }
  if (cfg.planner.psi < 0.0) errors.push_back("mcts.psi: must be nonnegative");
  const std::string other = kv.get_string(
      "mcts.other_agent_policy",
      cfg.planner.other_agent_model == OtherAgentModel::Queue ? "queue" : "static");
  if (other == "static") {
    cfg.planner.other_agent_model = OtherAgentModel::Static;
  } else if (other == "queue") {
    cfg.planner.other_agent_model = OtherAgentModel::Queue;
  } else {
    errors.push_back("mcts.other_agent_policy: expected static|queue");
  }
  cfg.oracle = kv.get_bool("mcts.oracle", cfg.oracle, errors);
  cfg.planner.rebalance_period_min = cfg.rebalance_period_min;
  return cfg;
}

KeyValueConfig experiment_to_config(const ExperimentConfig& cfg) {
  KeyValueConfig kv;
  kv.set("experiment.id", cfg.id);
  kv.set("experiment.policy", policy_name(cfg.policy));
  std::string seeds;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(cfg.seeds[i]);
  }
  kv.set("experiment.seeds", seeds);
  kv.set("grid.width", std::to_string(cfg.grid.width));
  kv.set("grid.height", std::to_string(cfg.grid.height));
  kv.set("grid.cell_miles", fmt(cfg.grid.cell_miles));
  kv.set("travel.speed_mi_per_min", fmt(cfg.tm.speed_mi_per_min));
  kv.set("fleet.size", std::to_string(cfg.fleet));
  kv.set("fleet.initial", cfg.initial_placement);
  if (!cfg.depot_file.empty()) kv.set("depots.file", cfg.depot_file);
  kv.set("depots.auto_count", std::to_string(cfg.auto_depot_count));
  kv.set("depots.seed", std::to_string(cfg.depot_seed));
  if (!cfg.incident_csv.empty()) kv.set("incidents.csv", cfg.incident_csv);
  kv.set("synthetic.hotspots", std::to_string(cfg.synthetic.hotspots));
  kv.set("synthetic.base_rate", fmt(cfg.synthetic.base_rate));
  kv.set("synthetic.hotspot_rate", fmt(cfg.synthetic.hotspot_rate));
  kv.set("synthetic.duration_min", fmt(cfg.synthetic.duration_min));
  kv.set("split.train_minutes", fmt(cfg.train_minutes));
  kv.set("split.eval_minutes", fmt(cfg.eval_minutes));
  kv.set("service.minutes", fmt(cfg.service_minutes));
  kv.set("service.distribution", cfg.service_exponential ? "exponential" : "constant");
  kv.set("rebalance.period_min", fmt(cfg.rebalance_period_min));
  kv.set("queue.roi", fmt(cfg.queue_roi));
  kv.set("mcts.iterations", std::to_string(cfg.planner.iteration_limit));
  kv.set("mcts.horizon_min", fmt(cfg.planner.horizon_min));
  kv.set("mcts.psi", fmt(cfg.planner.psi));
  kv.set("mcts.alpha", fmt(cfg.planner.alpha_per_second));
  kv.set("mcts.chains", std::to_string(cfg.planner.n_chains));
  kv.set("mcts.ucb_c", fmt(cfg.planner.ucb_c));
  kv.set("mcts.other_agent_policy",
         cfg.planner.other_agent_model == OtherAgentModel::Queue ? "queue" : "static");
  kv.set("mcts.oracle", cfg.oracle ? "true" : "false");
  return kv;
}

std::vector<Depot> lattice_depots(const Grid& grid, int count, std::uint64_t seed) {
  if (count < 1) throw std::domain_error("depot count must be >= 1");
  if (count > grid.n_cells()) throw std::domain_error("more depots than cells");
  Rng rng(derive_seed(seed, 0xD390));
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(
                                    static_cast<double>(count) * grid.width / grid.height))));
  const int rows = (count + cols - 1) / cols;
  std::set<CellId> taken;
  std::vector<Depot> depots;
  for (int r = 0; r < rows && static_cast<int>(depots.size()) < count; ++r) {
    for (int c = 0; c < cols && static_cast<int>(depots.size()) < count; ++c) {
      int x = static_cast<int>((c + 0.5) * grid.width / cols) + rng.below_int(3) - 1;
      int y = static_cast<int>((r + 0.5) * grid.height / rows) + rng.below_int(3) - 1;
      x = std::clamp(x, 0, grid.width - 1);
      y = std::clamp(y, 0, grid.height - 1);
      CellId cell = grid.cell_at(x, y);
      while (taken.count(cell)) cell = (cell + 1) % grid.n_cells();
      taken.insert(cell);
      depots.push_back(Depot{static_cast<DepotId>(depots.size()), cell, 1});
    }
  }
  return depots;
}

std::vector<IncidentEvent> generate_synthetic_history(const Grid& grid, const SyntheticSpec& spec,
                                                      std::uint64_t seed) {
  validate_grid(grid);
  if (spec.base_rate < 0.0 || spec.hotspot_rate < 0.0) {
    throw std::domain_error("synthetic rates must be nonnegative");
  }
  if (!(spec.duration_min > 0.0)) throw std::domain_error("synthetic duration must be positive");
  if (spec.hotspots > grid.n_cells()) throw std::domain_error("more hotspots than cells");

  RateMap rates;
  rates.rate_per_cell.assign(static_cast<std::size_t>(grid.n_cells()), spec.base_rate);
  rates.trained_minutes = spec.duration_min;

  Rng rng(derive_seed(seed, 0x4075));
  std::set<CellId> hot;
  while (static_cast<int>(hot.size()) < spec.hotspots) {
    hot.insert(static_cast<CellId>(rng.below(static_cast<std::uint64_t>(grid.n_cells()))));
  }
  for (CellId c : hot) rates.rate_per_cell[static_cast<std::size_t>(c)] = spec.hotspot_rate;

  if (rates.total_rate() <= 0.0) return {};
  return sample_chain(rates, 0.0, spec.duration_min, derive_seed(seed, 0xC4A1)).events;
}

void generate_synthetic_csv(const std::string& path, const Grid& grid, const SyntheticSpec& spec,
                            std::uint64_t seed) {
  write_incidents_csv(path, generate_synthetic_history(grid, spec, seed), grid);
}

namespace {

std::vector<Depot> resolve_depots(const ExperimentConfig& cfg) {
  if (!cfg.depot_file.empty()) return load_depots_csv(cfg.depot_file, cfg.grid);
  return lattice_depots(cfg.grid, cfg.auto_depot_count, cfg.depot_seed);
}

Occupancy initial_occupancy(const ExperimentConfig& cfg, const std::vector<Depot>& depots,
                            const RateMap& rates, const ServiceModel& sm) {
  if (cfg.initial_placement == "greedy" && rates.total_rate() > 0.0) {
    return greedy_place(cfg.fleet, depots, rates, sm, cfg.grid, cfg.tm, cfg.queue_roi);
  }
  // First depots by id, capacity permitting.
  Occupancy occ;
  std::vector<Depot> ordered = depots;
  std::sort(ordered.begin(), ordered.end(),
            [](const Depot& a, const Depot& b) { return a.id < b.id; });
  int left = cfg.fleet;
  for (const auto& d : ordered) {
    if (left == 0) break;
    const int n = std::min(left, d.capacity);
    occ.count[d.id] = n;
    left -= n;
  }
  if (left > 0) throw std::domain_error("fleet exceeds total depot capacity");
  return occ;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (total_capacity(resolve_depots(cfg)) < cfg.fleet) {
    throw std::domain_error("fleet exceeds total depot capacity");
  }
  const fs::path dir = fs::path(out_dir) / cfg.id;
  fs::create_directories(dir);

  RunReport report;
  report.identifier = cfg.id;
  report.seeds = cfg.seeds;
  report.has_distance = cfg.policy != PolicyKind::None;

  std::vector<double> response_samples;
  std::vector<double> distance_samples;

  const auto depots = resolve_depots(cfg);
  const ServiceModel sm = ServiceModel::from_mean_minutes(cfg.service_minutes);
  const ServiceTimeModel service{cfg.service_exponential ? ServiceTimeModel::Kind::Exponential
                                                         : ServiceTimeModel::Kind::Constant,
                                 cfg.service_minutes};

  for (std::uint64_t seed : cfg.seeds) {
    std::vector<IncidentEvent> history;
    if (!cfg.incident_csv.empty()) {
      history = load_incidents_csv(cfg.incident_csv, cfg.grid);
    } else {
      history = generate_synthetic_history(cfg.grid, cfg.synthetic, derive_seed(seed, 11));
    }

    std::vector<IncidentEvent> train;
    for (const auto& ev : history) {
      if (ev.time_min < cfg.train_minutes) train.push_back(ev);
    }
    const RateMap rates = fit_rates(train, cfg.grid, cfg.train_minutes);
    const IncidentChain eval = oracle_chain(history, cfg.train_minutes, cfg.eval_minutes);

    const Occupancy occ0 = initial_occupancy(cfg, depots, rates, sm);
    Engine engine(cfg.grid, cfg.tm, depots, service, initial_world(depots, occ0, eval.start_min),
                  derive_seed(seed, 13));

    std::unique_ptr<RebalancePolicy> policy;
    switch (cfg.policy) {
      case PolicyKind::None:
        policy = std::make_unique<NoRebalancePolicy>();
        break;
      case PolicyKind::Queue:
        policy = std::make_unique<QueueRebalancePolicy>(rates, sm, cfg.queue_roi);
        break;
      case PolicyKind::Mcts: {
        PlannerConfig pc = cfg.planner;
        pc.rebalance_period_min = cfg.rebalance_period_min;
        std::optional<IncidentChain> oracle;
        if (cfg.oracle) oracle = eval;
        policy = std::make_unique<MctsPlanner>(pc, rates, oracle, sm, cfg.queue_roi,
                                               derive_seed(seed, 17));
        break;
      }
    }

    const SimulationResult result =
        run_simulation(engine, *policy, eval, cfg.rebalance_period_min);

    const std::string resp_csv = (dir / ("seed_" + std::to_string(seed) + "_responses.csv")).string();
    write_responses_csv(resp_csv, result.responses);
    report.response_csvs.push_back(resp_csv);
    if (cfg.policy != PolicyKind::None) {
      const std::string reb_csv =
          (dir / ("seed_" + std::to_string(seed) + "_rebalances.csv")).string();
      write_rebalances_csv(reb_csv, result.rebalances);
      report.rebalance_csvs.push_back(reb_csv);
    }

    double sum = 0.0;
    for (const auto& r : result.responses) {
      response_samples.push_back(r.response_minutes());
      sum += r.response_minutes();
    }
    report.per_seed_mean_response.push_back(
        result.responses.empty() ? 0.0 : sum / static_cast<double>(result.responses.size()));

    std::map<double, double> per_step;
    for (const auto& e : result.rebalances) per_step[e.step_time] += e.miles;
    for (double t : result.rebalance_steps) {
      distance_samples.push_back(per_step[t] / static_cast<double>(cfg.fleet));
    }
  }

  report.response = summarize_samples(std::move(response_samples));
  if (report.has_distance) report.distance = summarize_samples(std::move(distance_samples));
  write_report_json((dir / "summary.json").string(), report);
  return report;
}

std::vector<ExperimentConfig> default_grid(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> grid;

  ExperimentConfig b = base;
  b.id = "BASE";
  b.policy = PolicyKind::None;
  grid.push_back(b);

  for (int roi = 1; roi <= 5; ++roi) {
    ExperimentConfig q = base;
    q.id = "Q-" + std::to_string(roi);
    q.policy = PolicyKind::Queue;
    q.queue_roi = roi;
    q.rebalance_period_min = 30.0;  // queue runs balance every half hour
    grid.push_back(q);
  }

  // M-1 carries the baseline planner parameters; every other MCTS run varies
  // one knob.
  ExperimentConfig m1 = base;
  m1.id = "M-1";
  m1.policy = PolicyKind::Mcts;
  m1.oracle = false;
  m1.planner.iteration_limit = 250;
  m1.planner.horizon_min = 120.0;
  m1.planner.psi = 10.0;
  m1.planner.alpha_per_second = 0.99995;
  m1.planner.n_chains = 5;
  m1.planner.other_agent_model = OtherAgentModel::Static;
  m1.rebalance_period_min = 60.0;
  m1.planner.rebalance_period_min = 60.0;

  ExperimentConfig mr1 = m1;
  mr1.id = "MR-1";
  mr1.oracle = true;
  grid.push_back(mr1);

  ExperimentConfig mr2 = m1;
  mr2.id = "MR-2";
  mr2.oracle = true;
  mr2.planner.other_agent_model = OtherAgentModel::Queue;
  grid.push_back(mr2);

  grid.push_back(m1);

  ExperimentConfig m2 = m1;
  m2.id = "M-2";
  m2.planner.iteration_limit = 100;
  grid.push_back(m2);

  ExperimentConfig m3 = m1;
  m3.id = "M-3";
  m3.planner.iteration_limit = 500;
  grid.push_back(m3);

  ExperimentConfig m4 = m1;
  m4.id = "M-4";
  m4.planner.psi = 0.0;
  grid.push_back(m4);

  ExperimentConfig m5 = m1;
  m5.id = "M-5";
  m5.planner.psi = 100.0;
  grid.push_back(m5);

  ExperimentConfig m6 = m1;
  m6.id = "M-6";
  m6.planner.horizon_min = 30.0;
  m6.rebalance_period_min = 30.0;
  m6.planner.rebalance_period_min = 30.0;
  grid.push_back(m6);

  return grid;
}

void write_report_json(const std::string& path, const RunReport& report) {
  json j;
  j["identifier"] = report.identifier;
  j["seeds"] = report.seeds;
  j["response"] = stats_to_json(report.response);
  if (report.has_distance) {
    j["distance"] = stats_to_json(report.distance);
  } else {
    j["distance"] = nullptr;
  }
  j["per_seed_mean_response"] = report.per_seed_mean_response;
  j["response_csvs"] = report.response_csvs;
  j["rebalance_csvs"] = report.rebalance_csvs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << '\n';
}

RunReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  json j;
  in >> j;
  RunReport r;
  r.identifier = j.at("identifier").get<std::string>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.response = stats_from_json(j.at("response"));
  if (!j.at("distance").is_null()) {
    r.has_distance = true;
    r.distance = stats_from_json(j.at("distance"));
  }
  r.per_seed_mean_response = j.at("per_seed_mean_response").get<std::vector<double>>();
  r.response_csvs = j.at("response_csvs").get<std::vector<std::string>>();
  r.rebalance_csvs = j.at("rebalance_csvs").get<std::vector<std::string>>();
  return r;
}

std::string summarize_reports(std::vector<RunReport> reports, const std::string& csv_path) {
  std::sort(reports.begin(), reports.end(),
            [](const RunReport& a, const RunReport& b) { return a.identifier < b.identifier; });

  const std::vector<std::string> cols = {
      "identifier", "responses",  "resp_mean", "resp_variance", "resp_min",
      "resp_q1",    "resp_median", "resp_q3",  "resp_max",      "steps",
      "miles_mean", "miles_q1",   "miles_median", "miles_q3",   "miles_max"};

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::vector<std::string> row;
    row.push_back(r.identifier);
    row.push_back(std::to_string(r.response.count));
    row.push_back(fmt(r.response.mean));
    row.push_back(fmt(r.response.variance));
    row.push_back(fmt(r.response.min));
    row.push_back(fmt(r.response.q1));
    row.push_back(fmt(r.response.median));
    row.push_back(fmt(r.response.q3));
    row.push_back(fmt(r.response.max));
    if (r.has_distance) {
      row.push_back(std::to_string(r.distance.count));
      row.push_back(fmt(r.distance.mean));
      row.push_back(fmt(r.distance.q1));
      row.push_back(fmt(r.distance.median));
      row.push_back(fmt(r.distance.q3));
      row.push_back(fmt(r.distance.max));
    } else {
      for (int k = 0; k < 6; ++k) row.push_back("");
    }
    rows.push_back(std::move(row));
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write summary csv: " + csv_path);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  }

  std::vector<std::size_t> widths(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) widths[i] = cols[i].size();
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::ostringstream text;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    text << (i ? "  " : "") << cols[i] << std::string(widths[i] - cols[i].size(), ' ');
  }
  text << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      text << (i ? "  " : "") << row[i] << std::string(widths[i] - row[i].size(), ' ');
    }
    text << '\n';
  }
  return text.str();
}

}  // namespace erm
