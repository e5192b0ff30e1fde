#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rra/pde.hpp"
#include "rra/trainer.hpp"

namespace rra {

/// One experiment: a problem, a method and a resolved training setup,
/// executed for each seed into its own run directory. `train` is the
/// fully resolved configuration; `train_overrides` keeps only the keys
/// the user actually supplied, so sweep drivers can replay them on top
/// of their own presets.
struct ExperimentConfig {
  std::string problem = "poisson2d";
  std::string method = "baseline";  // baseline | rra_hinge | rra_wms
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir;  // empty: $RRA_OUT_ROOT or "runs"
  TrainConfig train;
  nlohmann::json train_overrides = nlohmann::json::object();
};

/// Problem + method defaults (paper setup) before user overrides.
TrainConfig method_train_config(ProblemKind kind, const std::string& method);

/// Parses a config file; unknown problems/methods or malformed JSON
/// throw std::runtime_error. Keys omitted keep their defaults.
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

/// Applies "train": {...} JSON overrides onto an existing TrainConfig.
void apply_train_overrides(TrainConfig& cfg, const nlohmann::json& j);

nlohmann::json experiment_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg);
std::filesystem::path run_dir_for(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunOutcome {
  std::filesystem::path dir;
  MetricsBundle metrics;
  double final_eps = 0.0;
  bool aborted = false;
  bool reused = false;  // true when persisted metrics were loaded
};

/// Trains one seed (or reuses the persisted run) and writes the run
/// directory: config.json, epochs.csv, checkpoint.txt, metrics.json,
/// residuals.csv.
RunOutcome run_one(const ExperimentConfig& cfg, std::uint64_t seed, bool reuse_existing);

struct CompareRow {
  std::string method;
  MetricsBundle metrics;  // averaged over seeds
  bool best_rel_l2 = false;
  bool best_l_inf = false;
  bool best_q95 = false;
};

/// Runs (or reuses) every (method, seed) pair and writes a one-row-per-
/// method table with best-per-column flags to compare.csv under out_dir.
std::vector<CompareRow> compare(const ExperimentConfig& base,
                                const std::vector<std::string>& methods);

struct AblateRow {
  double alpha = 0.0;
  double rel_l2 = 0.0;
  double mean_abs_residual = 0.0;
  double final_eps = 0.0;
};

struct AblateResult {
  std::vector<AblateRow> averaged;                      // across problems
  std::vector<std::vector<AblateRow>> per_problem;      // [problem][alpha]
  std::vector<std::string> problems;
};

/// Tail-level ablation: tail-only objective after warmup, fixed network
/// and budget, swept over alpha and averaged over the given problems.
AblateResult ablate(const std::vector<std::string>& problems,
                    const std::vector<double>& alphas, Penalty penalty,
                    const ExperimentConfig& base);

/// Exports ccdf.csv from a persisted run's residual dump.
std::filesystem::path export_ccdf(const std::filesystem::path& run_dir,
                                  int thresholds = 200);

}  // namespace rra
