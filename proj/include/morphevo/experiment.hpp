#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "morphevo/evolution.hpp"

namespace morphevo {

// Everything a reproduction run needs, loadable from a key = value file.
struct ExperimentConfig {
  std::string encoding = "tree";  // tree | lsystem
  std::uint64_t seed = 1;
  int population = 100;
  int generations = 50;
  int repetitions = 1;
  int tournament_size = 2;

  int module_cap = 30;
  double mutation_aggregate = 0.59;
  double param_mutation_rate = 0.2;
  double param_sigma_fraction = 0.1;
  double init_fill = 0.5;
  int max_init_depth = 4;

  int lsystem_iterations = 3;
  int sentence_cap = 300;
  int max_rule_length = 10;
  int coupling_range = 3;

  double duration_s = 30.0;
  double control_dt_s = 0.005;
  double sample_period_s = 0.1;
  double cell_size_cm = 4.0;

  std::string output_dir = "morphevo_out";
  bool dump_trajectories = false;

  static ExperimentConfig parse_text(std::string_view text);
  static ExperimentConfig parse_file(const std::filesystem::path& path);

  // Canonical snapshot with every key in fixed order; parse_text round-trips.
  std::string canonical_text() const;

  void validate() const;  // throws std::runtime_error on bad values

  SimConfig sim_config() const;
  EngineConfig engine_config() const;
};

// Runs all repetitions (repetition r uses seed + r), saves run_XX directories
// plus the config snapshot, then analyses the artifact in place.
void run_experiment(const ExperimentConfig& cfg);

std::vector<RunLog> load_artifact(const std::filesystem::path& dir);

// Writes analysis/heritability.csv, diversity.csv, selection_response.csv and
// medians.csv from the run directories found under `dir`.
void analyze_artifact(const std::filesystem::path& dir);

}  // namespace morphevo
