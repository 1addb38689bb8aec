#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "erm/config.hpp"
#include "erm/mcts.hpp"
#include "erm/simulator.hpp"
#include "erm/stats.hpp"

namespace erm {

enum class PolicyKind { None, Queue, Mcts };

// Uniform background rate with elevated hotspot cells; the stand-in for a
// real incident log.
struct SyntheticSpec {
  int hotspots = 10;
  double base_rate = 0.0002;     // incidents per minute per cell
  double hotspot_rate = 0.002;   // rate of each hotspot cell
  double duration_min = 17280.0;
};

struct ExperimentConfig {
  std::string id = "BASE";
  PolicyKind policy = PolicyKind::None;
  double queue_roi = 3.0;
  PlannerConfig planner;
  bool oracle = false;

  Grid grid{30, 30, 1.0};
  TravelModel tm{0.5};
  int fleet = 26;
  std::string depot_file;        // empty: generated lattice
  int auto_depot_count = 30;
  std::uint64_t depot_seed = 4242;

  std::string incident_csv;      // empty: synthetic workload
  SyntheticSpec synthetic;

  double train_minutes = 14400.0;
  double eval_minutes = 2880.0;
  double service_minutes = 20.0;
  bool service_exponential = false;
  double rebalance_period_min = 60.0;
  std::string initial_placement = "greedy";  // or "first_depots"
  std::vector<std::uint64_t> seeds{101, 202, 303, 404, 505};
};

// Mapping between ExperimentConfig and the flat dotted-key format. Problems
// are appended to `errors` with their key names.
ExperimentConfig experiment_from_config(const KeyValueConfig& kv, std::vector<std::string>& errors);
KeyValueConfig experiment_to_config(const ExperimentConfig& cfg);

struct RunReport {
  std::string identifier;
  std::vector<std::uint64_t> seeds;
  SummaryStats response;                       // pooled response minutes
  bool has_distance = false;
  SummaryStats distance;                       // fleet-average miles per step
  std::vector<double> per_seed_mean_response;
  std::vector<std::string> response_csvs;
  std::vector<std::string> rebalance_csvs;
};

// Depots on a jittered lattice, capacity 1, deterministic per seed.
std::vector<Depot> lattice_depots(const Grid& grid, int count, std::uint64_t seed);

std::vector<IncidentEvent> generate_synthetic_history(const Grid& grid, const SyntheticSpec& spec,
                                                      std::uint64_t seed);
void generate_synthetic_csv(const std::string& path, const Grid& grid, const SyntheticSpec& spec,
                            std::uint64_t seed);

// Fits rates on the training window, evaluates the policy on the evaluation
// window once per seed, writes per-seed CSVs plus a summary JSON under
// out_dir/<id>/, and returns the pooled report.
RunReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// BASE, Q-1..Q-5, MR-1, MR-2, M-1..M-6 derived from a shared base config.
std::vector<ExperimentConfig> default_grid(const ExperimentConfig& base);

void write_report_json(const std::string& path, const RunReport& report);
RunReport load_report_json(const std::string& path);

// One row per experiment, stable column order; also writes the table as CSV
// when csv_path is nonempty. Reports lacking rebalancing leave the distance
// columns empty.
std::string summarize_reports(std::vector<RunReport> reports, const std::string& csv_path);

}  // namespace erm
