// Command-line front end: synthetic data generation, rate fitting, single
// simulations, the experiment grid, and report summaries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "erm/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::vector<std::string> sets;  // raw key=value pairs
};

erm::ExperimentConfig load_experiment(const std::string& config_path, const Overrides& ov) {
  erm::KeyValueConfig kv;
  if (!config_path.empty()) kv = erm::KeyValueConfig::from_file(config_path);
  for (const auto& s : ov.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects key=value, got " + s);
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
  std::vector<std::string> errors;
  auto cfg = erm::experiment_from_config(kv, errors);
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

void add_planner_flags(CLI::App* cmd, Overrides& ov) {
  auto push = [&ov](const std::string& key) {
    return [&ov, key](const std::string& v) { ov.sets.push_back(key + "=" + v); };
  };
  cmd->add_option_function<std::string>("--roi", push("queue.roi"), "queue policy radius of influence (miles)");
  cmd->add_option_function<std::string>("--iterations", push("mcts.iterations"), "MCTS iteration budget");
  cmd->add_option_function<std::string>("--horizon-min", push("mcts.horizon_min"), "MCTS lookahead horizon (minutes)");
  cmd->add_option_function<std::string>("--psi", push("mcts.psi"), "distance weight in the balancing reward");
  cmd->add_option_function<std::string>("--alpha", push("mcts.alpha"), "per-second reward discount factor");
  cmd->add_option_function<std::string>("--rebalance-min", push("rebalance.period_min"), "minutes between balancing steps");
  cmd->add_option_function<std::string>("--chains", push("mcts.chains"), "sampled incident chains per decision");
  cmd->add_option_function<std::string>("--other-agent-policy", push("mcts.other_agent_policy"), "static|queue");
  cmd->add_option_function<std::string>("--oracle", push("mcts.oracle"), "true to plan on the true future");
  cmd->add_option_function<std::string>("--policy", push("experiment.policy"), "none|queue|mcts");
  cmd->add_option_function<std::string>("--id", push("experiment.id"), "experiment identifier");
  cmd->add_option_function<std::string>("--seeds", push("experiment.seeds"), "comma-separated seed list");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emergency responder rebalancing toolkit"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic incident history CSV");
  std::string gen_out = "history.csv";
  std::string gen_depots_out;
  int gen_w = 30, gen_h = 30, gen_hotspots = 10, gen_ndepots = 30;
  double gen_cell = 1.0, gen_base = 0.0002, gen_hot = 0.002, gen_dur = 17280.0;
  std::uint64_t gen_seed = 1, gen_depot_seed = 4242;
  gen->add_option("--out", gen_out, "output incident CSV path");
  gen->add_option("--depots-out", gen_depots_out, "also write a depot CSV here");
  gen->add_option("--width", gen_w);
  gen->add_option("--height", gen_h);
  gen->add_option("--cell-miles", gen_cell);
  gen->add_option("--hotspots", gen_hotspots);
  gen->add_option("--base-rate", gen_base, "background incidents/min/cell");
  gen->add_option("--hotspot-rate", gen_hot, "incidents/min at each hotspot cell");
  gen->add_option("--duration-min", gen_dur);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--n-depots", gen_ndepots);
  gen->add_option("--depot-seed", gen_depot_seed);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit per-cell incident rates from a history CSV");
  std::string fit_history, fit_out = "rates.csv";
  int fit_w = 30, fit_h = 30;
  double fit_cell = 1.0, fit_dur = 0.0;
  fit->add_option("--history", fit_history)->required();
  fit->add_option("--out", fit_out);
  fit->add_option("--width", fit_w);
  fit->add_option("--height", fit_h);
  fit->add_option("--cell-miles", fit_cell);
  fit->add_option("--duration-min", fit_dur, "observation window (default: last event time)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a single experiment configuration");
  std::string sim_config, sim_out = "out";
  Overrides sim_ov;
  sim->add_option("--config", sim_config, "experiment config file");
  sim->add_option("--out-dir", sim_out);
  sim->add_option("--set", sim_ov.sets, "override any config key (key=value)");
  add_planner_flags(sim, sim_ov);

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run one experiment or the default grid");
  std::string exp_config, exp_out = "out";
  bool exp_grid = false;
  Overrides exp_ov;
  exp->add_option("--config", exp_config, "experiment config file");
  exp->add_option("--out-dir", exp_out);
  exp->add_flag("--default-grid", exp_grid, "run BASE, Q-1..Q-5, MR-1/2, M-1..M-6");
  exp->add_option("--set", exp_ov.sets, "override any config key (key=value)");
  add_planner_flags(exp, exp_ov);

  // summarize
  auto* sum = app.add_subcommand("summarize", "Tabulate summary.json reports");
  std::string sum_in = "out", sum_out = "summary.csv";
  sum->add_option("--in-dir", sum_in, "directory searched recursively for summary.json");
  sum->add_option("--out", sum_out, "comparison table CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      erm::Grid grid{gen_w, gen_h, gen_cell};
      erm::SyntheticSpec spec{gen_hotspots, gen_base, gen_hot, gen_dur};
      erm::generate_synthetic_csv(gen_out, grid, spec, gen_seed);
      std::cout << "wrote " << gen_out << "\n";
      if (!gen_depots_out.empty()) {
        erm::write_depots_csv(gen_depots_out, erm::lattice_depots(grid, gen_ndepots, gen_depot_seed),
                              grid);
        std::cout << "wrote " << gen_depots_out << "\n";
      }
      return 0;
    }

    if (fit->parsed()) {
      erm::Grid grid{fit_w, fit_h, fit_cell};
      const auto events = erm::load_incidents_csv(fit_history, grid);
      double duration = fit_dur;
      if (duration <= 0.0) duration = events.empty() ? 1.0 : events.back().time_min;
      const auto rates = erm::fit_rates(events, grid, duration);
      std::ofstream out(fit_out);
      if (!out) throw std::runtime_error("cannot write " + fit_out);
      out << "cell_x,cell_y,rate_per_min\n";
      char buf[64];
      for (erm::CellId c = 0; c < grid.n_cells(); ++c) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g", grid.cell_x(c), grid.cell_y(c),
                      rates.rate(c));
        out << buf << '\n';
      }
      std::cout << "wrote " << fit_out << "\n";
      return 0;
    }

    if (sim->parsed()) {
      auto cfg = load_experiment(sim_config, sim_ov);
      const auto report = erm::run_experiment(cfg, sim_out);
      std::cout << erm::summarize_reports({report}, "");
      return 0;
    }

    if (exp->parsed()) {
      auto cfg = load_experiment(exp_config, exp_ov);
      std::vector<erm::RunReport> reports;
      if (exp_grid) {
        for (const auto& entry : erm::default_grid(cfg)) {
          std::cout << "running " << entry.id << "...\n" << std::flush;
          reports.push_back(erm::run_experiment(entry, exp_out));
        }
      } else {
        reports.push_back(erm::run_experiment(cfg, exp_out));
      }
      const std::string table =
          erm::summarize_reports(reports, (fs::path(exp_out) / "summary.csv").string());
      std::cout << table;
      return 0;
    }

    if (sum->parsed()) {
      std::vector<erm::RunReport> reports;
      for (const auto& entry : fs::recursive_directory_iterator(sum_in)) {
        if (entry.is_regular_file() && entry.path().filename() == "summary.json") {
          reports.push_back(erm::load_report_json(entry.path().string()));
        }
      }
      if (reports.empty()) throw std::runtime_error("no summary.json files under " + sum_in);
      std::cout << erm::summarize_reports(reports, sum_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
