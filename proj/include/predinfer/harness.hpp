#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "predinfer/datagen.hpp"
#include "predinfer/inference.hpp"
#include "predinfer/predictor.hpp"

namespace predinfer::harness {

enum class Design { fixed_fhat, retrain_per_replicate };

std::vector<std::string> default_methods();
const std::vector<std::string>& known_methods();
const std::vector<std::string>& preset_names();

struct ExperimentConfig {
  Design design = Design::fixed_fhat;
  double beta1_star = 0.0;
  std::vector<std::pair<int, int>> n_grid;  // (n_lab, n_unlab) pairs
  int n_train = 300;
  int replicates = 1000;
  std::vector<std::string> methods = default_methods();
  std::vector<std::string> fhat_ids;  // fixed design: subset of {f1,f2,f3,oracle}
  int bootstrap_b = 100;
  double ci_level = 0.95;
  inference::NoiseMode noise_mode = inference::NoiseMode::gaussian;
  double noise_sd = 1.0;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware count, capped by PREDINFER_THREADS

  void validate() const;
};

// Named configurations covering the simulation designs this project audits.
ExperimentConfig make_preset(const std::string& name);

struct ReplicateRecord {
  int replicate = 0;
  std::string method;
  std::string fhat_id;
  int n_lab = 0;
  int n_unlab = 0;
  double beta_hat = 0.0;
  double se = 0.0;
  double t_stat = 0.0;   // (beta_hat - beta1_star) / se
  double p_value = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covered = false;        // ci contains beta1_star
  bool rejected_at_05 = false; // p_value < 0.05
  std::string status = "ok";   // or an error tag; numeric fields are NaN then
};

struct SummaryCell {
  std::string method;
  std::string fhat_id;
  int n_lab = 0;
  int n_unlab = 0;
  int replicates = 0;  // records attempted in this cell
  double rejection_rate = 0.0;
  double coverage = 0.0;
  double ks_stat = 0.0;  // t statistics vs the standard normal CDF
  double mean_beta = 0.0;
  double sd_beta = 0.0;
  double median_abs_t = 0.0;
  std::vector<double> t_quantiles;  // at probabilities 0.01..0.99
};

using ExperimentSummary = std::vector<SummaryCell>;

// Trains (or wraps) the prediction models used by every replicate of a
// fixed-predictor experiment. Training seeds are fixed constants so f1/f2/f3
// are the same models in every run with the same configuration.
std::vector<predictor::PredictorModel> make_fixed_predictors(const ExperimentConfig& config);

// The labeled/unlabeled pair a given replicate sees (keyed on the master seed,
// grid cell and replicate index).
std::pair<datagen::LabeledDataset, datagen::UnlabeledDataset> replicate_datasets(
    const ExperimentConfig& config, int grid_index, int replicate_index);

// Runs one replicate of one grid cell and returns a record for every
// (predictor, method) combination. Estimator failures become failure-tagged
// records rather than exceptions.
std::vector<ReplicateRecord> run_replicate(
    const ExperimentConfig& config, int grid_index, int replicate_index,
    const std::vector<predictor::PredictorModel>* fixed_predictors);

// Full grid, optionally multi-threaded; record order is deterministic and
// independent of the thread count.
std::vector<ReplicateRecord> run_all(const ExperimentConfig& config);

ExperimentSummary summarize(const std::vector<ReplicateRecord>& records);

void write_records_csv(const std::vector<ReplicateRecord>& records, const std::string& path);
void write_summary_csv(const ExperimentSummary& summary, const std::string& path);
void write_qq_csv(const ExperimentSummary& summary, const std::string& path);

struct ExperimentResult {
  std::vector<ReplicateRecord> records;
  ExperimentSummary summary;
  std::string records_path;
  std::string summary_path;
  std::string qq_path;
};

// Runs the grid and writes records.csv, summary.csv and qq.csv under out_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace predinfer::harness
