#include "predinfer/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "predinfer/csv.hpp"
#include "predinfer/rng.hpp"
#include "predinfer/stats.hpp"

namespace predinfer::harness {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Stream derivation tags; replicate streams are keyed on
// (master_seed, grid_index, replicate_index, purpose).
constexpr std::uint64_t kLabTag = 1;
constexpr std::uint64_t kUnlabTag = 2;
constexpr std::uint64_t kTrainTag = 3;
constexpr std::uint64_t kBootTagBase = 100;  // + predictor index

std::uint64_t derive_seed(const ExperimentConfig& config, int grid_index, int replicate_index,
                          std::uint64_t tag) {
  std::uint64_t h = config.master_seed;
  for (std::uint64_t k : {static_cast<std::uint64_t>(grid_index),
                          static_cast<std::uint64_t>(replicate_index), tag}) {
    h = rng::mix64(h + rng::kGolden * (k + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

// Training seeds for the three pre-trained predictors; fixed so that the same
// configuration always yields bit-identical models.
std::uint64_t fixed_training_seed(const std::string& id) {
  if (id == "f1") return 1001;
  if (id == "f2") return 1002;
  if (id == "f3") return 1003;
  throw std::invalid_argument("no fixed training seed for predictor id '" + id + "'");
}

datagen::GenConfig data_config(const ExperimentConfig& config, int n, std::uint64_t seed) {
  datagen::GenConfig c = datagen::GenConfig::defaults(n, config.beta1_star, seed);
  c.noise_sd = config.noise_sd;
  return c;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

int resolve_threads(const ExperimentConfig& config) {
  if (config.threads > 0) return config.threads;
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("PREDINFER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

ReplicateRecord base_record(int replicate, const std::string& method, const std::string& fhat_id,
                            int n_lab, int n_unlab) {
  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.method = method;
  rec.fhat_id = fhat_id;
  rec.n_lab = n_lab;
  rec.n_unlab = n_unlab;
  rec.beta_hat = rec.se = rec.t_stat = rec.p_value = rec.ci_lo = rec.ci_hi = kNan;
  return rec;
}

void fill_record(ReplicateRecord& rec, const inference::EstimateReport& est, double beta1_star,
                 double ci_level) {
  const inference::TestSummary s = inference::report(est, beta1_star, ci_level);
  rec.beta_hat = est.slope();
  rec.se = est.se;
  rec.t_stat = s.t_stat;
  rec.p_value = s.p_value;
  rec.ci_lo = s.ci_lo;
  rec.ci_hi = s.ci_hi;
  rec.covered = (s.ci_lo <= beta1_star && beta1_star <= s.ci_hi);
  rec.rejected_at_05 = (s.p_value < 0.05);
  rec.status = "ok";
}

}  // namespace

std::vector<std::string> default_methods() {
  return {inference::method::classical, inference::method::naive, inference::method::analytic,
          inference::method::boot_param, inference::method::boot_nonparam,
          inference::method::ppi};
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> k = {
      inference::method::classical,  inference::method::naive,
      inference::method::analytic,   inference::method::analytic_pub,
      inference::method::boot_param, inference::method::boot_nonparam,
      inference::method::ppi};
  return k;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> k = {"paper-s3-null", "paper-s3-alt", "paper-s4-null",
                                             "paper-s4-alt", "oracle-extreme"};
  return k;
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("config: empty size grid");
  for (const auto& [n_lab, n_unlab] : n_grid) {
    if (n_lab < 10) throw std::invalid_argument("config: each n_lab must be >= 10");
    if (n_unlab < 3) throw std::invalid_argument("config: each n_unlab must be >= 3");
  }
  if (methods.empty()) throw std::invalid_argument("config: no methods selected");
  for (const auto& m : methods) {
    if (!contains(known_methods(), m)) throw std::invalid_argument("config: unknown method '" + m + "'");
  }
  if (fhat_ids.empty()) throw std::invalid_argument("config: no predictors selected");
  if (design == Design::retrain_per_replicate) {
    if (fhat_ids.size() != 1 || fhat_ids[0] != "retrained") {
      throw std::invalid_argument("config: the retraining design uses the single predictor id 'retrained'");
    }
    if (n_train < 30) throw std::invalid_argument("config: n_train must be >= 30");
  } else {
    for (const auto& id : fhat_ids) {
      if (id != "oracle") fixed_training_seed(id);  // throws on unknown ids
    }
    if (n_train < 30) throw std::invalid_argument("config: n_train must be >= 30");
  }
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw std::invalid_argument("config: ci_level in (0,1)");
  if (bootstrap_b < 1) throw std::invalid_argument("config: bootstrap replicates must be >= 1");
  if (!(noise_sd > 0.0)) throw std::invalid_argument("config: noise_sd must be > 0");
}

ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig c;
  const std::vector<std::pair<int, int>> tenth_grid = {{300, 3000}, {1000, 10000}, {3000, 30000}};
  if (name == "paper-s3-null" || name == "paper-s3-alt") {
    c.design = Design::fixed_fhat;
    c.beta1_star = (name == "paper-s3-alt") ? 1.0 : 0.0;
    c.n_grid = tenth_grid;
    c.fhat_ids = {"f1", "f2", "f3", "oracle"};
  } else if (name == "paper-s4-null" || name == "paper-s4-alt") {
    c.design = Design::retrain_per_replicate;
    c.beta1_star = (name == "paper-s4-alt") ? 1.0 : 0.0;
    c.n_grid = {{300, 300}};
    c.n_grid.insert(c.n_grid.end(), tenth_grid.begin(), tenth_grid.end());
    c.fhat_ids = {"retrained"};
  } else if (name == "oracle-extreme") {
    c.design = Design::fixed_fhat;
    c.beta1_star = 0.0;
    c.n_grid = tenth_grid;
    c.fhat_ids = {"oracle"};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

std::vector<predictor::PredictorModel> make_fixed_predictors(const ExperimentConfig& config) {
  std::vector<predictor::PredictorModel> out;
  out.reserve(config.fhat_ids.size());
  for (const auto& id : config.fhat_ids) {
    if (id == "oracle") {
      out.push_back(predictor::oracle_fhat(data_config(config, 1, 0)));
    } else {
      const auto training = datagen::generate(
          data_config(config, config.n_train, fixed_training_seed(id)));
      out.push_back(predictor::train_fhat(training, id));
    }
  }
  return out;
}

std::pair<datagen::LabeledDataset, datagen::UnlabeledDataset> replicate_datasets(
    const ExperimentConfig& config, int grid_index, int replicate_index) {
  const auto [n_lab, n_unlab] = config.n_grid[static_cast<std::size_t>(grid_index)];
  auto lab = datagen::generate(
      data_config(config, n_lab, derive_seed(config, grid_index, replicate_index, kLabTag)));
  auto unlab = datagen::strip_labels(datagen::generate(
      data_config(config, n_unlab, derive_seed(config, grid_index, replicate_index, kUnlabTag))));
  return {std::move(lab), std::move(unlab)};
}

std::vector<ReplicateRecord> run_replicate(
    const ExperimentConfig& config, int grid_index, int replicate_index,
    const std::vector<predictor::PredictorModel>* fixed_predictors) {
  const auto [n_lab, n_unlab] = config.n_grid[static_cast<std::size_t>(grid_index)];
  const auto [lab, unlab] = replicate_datasets(config, grid_index, replicate_index);

  std::vector<predictor::PredictorModel> retrained;
  const std::vector<predictor::PredictorModel>* predictors = fixed_predictors;
  if (config.design == Design::retrain_per_replicate) {
    const auto training = datagen::generate(data_config(
        config, config.n_train, derive_seed(config, grid_index, replicate_index, kTrainTag)));
    retrained.push_back(predictor::train_fhat(training, "retrained"));
    predictors = &retrained;
  }

  const bool want_boot = contains(config.methods, inference::method::boot_param) ||
                         contains(config.methods, inference::method::boot_nonparam);

  // classical ignores the predictor; computed once, recorded under every id
  inference::EstimateReport classical_est;
  std::string classical_status = "ok";
  if (contains(config.methods, inference::method::classical)) {
    try {
      classical_est = inference::estimate_classical(lab, config.ci_level);
    } catch (const Error& e) {
      classical_status = e.tag();
    }
  }

  std::vector<ReplicateRecord> records;
  records.reserve(predictors->size() * config.methods.size());

  for (std::size_t k = 0; k < predictors->size(); ++k) {
    const auto& fhat = (*predictors)[k];

    Eigen::VectorXd f_lab, f_unlab;
    std::string predict_status = "ok";
    try {
      f_lab = fhat.predict(lab.Z);
      f_unlab = fhat.predict(unlab.Z);
    } catch (const Error& e) {
      predict_status = e.tag();
    }

    // shared bootstrap pass for both standard errors
    inference::BootstrapPair boot;
    std::string boot_status = predict_status;
    if (want_boot && boot_status == "ok") {
      try {
        const auto rel = inference::relationship_from(lab.y, f_lab);
        inference::BootstrapConfig bcfg;
        bcfg.replicates = config.bootstrap_b;
        bcfg.noise = config.noise_mode;
        bcfg.ci_level = config.ci_level;
        auto stream = rng::Stream(derive_seed(config, grid_index, replicate_index,
                                              kBootTagBase + static_cast<std::uint64_t>(k)));
        boot = inference::wang_bootstrap_from(rel, unlab.x(), f_unlab, bcfg, stream);
      } catch (const Error& e) {
        boot_status = e.tag();
      }
    }

    for (const auto& m : config.methods) {
      ReplicateRecord rec = base_record(replicate_index, m, fhat.id(), n_lab, n_unlab);
      try {
        if (m == inference::method::classical) {
          if (classical_status != "ok") {
            rec.status = classical_status;
          } else {
            fill_record(rec, classical_est, config.beta1_star, config.ci_level);
          }
        } else if (predict_status != "ok") {
          rec.status = predict_status;
        } else if (m == inference::method::naive) {
          fill_record(rec, inference::naive_from(f_unlab, unlab.x(), config.ci_level),
                      config.beta1_star, config.ci_level);
        } else if (m == inference::method::analytic || m == inference::method::analytic_pub) {
          const auto variant = (m == inference::method::analytic)
                                   ? inference::AnalyticVariant::code
                                   : inference::AnalyticVariant::publication;
          fill_record(rec,
                      inference::wang_analytic_from(lab.y, f_lab, unlab.x(), f_unlab, variant,
                                                    config.ci_level),
                      config.beta1_star, config.ci_level);
        } else if (m == inference::method::boot_param || m == inference::method::boot_nonparam) {
          if (boot_status != "ok") {
            rec.status = boot_status;
          } else if (m == inference::method::boot_nonparam && config.bootstrap_b < 2) {
            rec.status = "undefined_se";
          } else {
            fill_record(rec,
                        m == inference::method::boot_param ? boot.parametric : boot.nonparametric,
                        config.beta1_star, config.ci_level);
          }
        } else if (m == inference::method::ppi) {
          fill_record(rec,
                      inference::ppi_from(lab.y, lab.x(), f_lab, unlab.x(), f_unlab,
                                          config.ci_level),
                      config.beta1_star, config.ci_level);
        }
      } catch (const Error& e) {
        rec.status = e.tag();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<ReplicateRecord> run_all(const ExperimentConfig& config) {
  config.validate();

  std::vector<predictor::PredictorModel> fixed;
  if (config.design == Design::fixed_fhat) fixed = make_fixed_predictors(config);
  const auto* fixed_ptr = (config.design == Design::fixed_fhat) ? &fixed : nullptr;

  const int n_tasks = static_cast<int>(config.n_grid.size()) * config.replicates;
  std::vector<std::vector<ReplicateRecord>> slots(static_cast<std::size_t>(n_tasks));

  const int threads = std::min(resolve_threads(config), n_tasks);
  std::atomic<int> next_task{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const int t = next_task.fetch_add(1);
      if (t >= n_tasks) break;
      const int grid_index = t / config.replicates;
      const int replicate_index = t % config.replicates;
      try {
        slots[static_cast<std::size_t>(t)] =
            run_replicate(config, grid_index, replicate_index, fixed_ptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ReplicateRecord> records;
  records.reserve(static_cast<std::size_t>(n_tasks) * config.methods.size() *
                  config.fhat_ids.size());
  for (auto& slot : slots) {
    for (auto& rec : slot) records.push_back(std::move(rec));
  }
  return records;
}

ExperimentSummary summarize(const std::vector<ReplicateRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");

  using Key = std::tuple<std::string, std::string, int, int>;
  std::map<Key, std::size_t> index;
  ExperimentSummary cells;
  std::vector<std::vector<const ReplicateRecord*>> grouped;

  for (const auto& rec : records) {
    const Key key{rec.method, rec.fhat_id, rec.n_lab, rec.n_unlab};
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, cells.size());
      SummaryCell cell;
      cell.method = rec.method;
      cell.fhat_id = rec.fhat_id;
      cell.n_lab = rec.n_lab;
      cell.n_unlab = rec.n_unlab;
      cells.push_back(std::move(cell));
      grouped.emplace_back();
      it = index.find(key);
    }
    grouped[it->second].push_back(&rec);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    SummaryCell& cell = cells[i];
    cell.replicates = static_cast<int>(grouped[i].size());
    std::vector<double> t_stats, betas, abs_t;
    int n_ok = 0, n_rejected = 0, n_covered = 0;
    for (const auto* rec : grouped[i]) {
      if (rec->status != "ok") continue;
      ++n_ok;
      n_rejected += rec->rejected_at_05 ? 1 : 0;
      n_covered += rec->covered ? 1 : 0;
      t_stats.push_back(rec->t_stat);
      abs_t.push_back(std::abs(rec->t_stat));
      betas.push_back(rec->beta_hat);
    }
    if (n_ok == 0) {
      cell.rejection_rate = cell.coverage = cell.ks_stat = kNan;
      cell.mean_beta = cell.sd_beta = cell.median_abs_t = kNan;
      continue;
    }
    cell.rejection_rate = static_cast<double>(n_rejected) / n_ok;
    cell.coverage = static_cast<double>(n_covered) / n_ok;
    cell.ks_stat = stats::ks_vs_std_normal(t_stats);
    cell.mean_beta = stats::mean(betas);
    cell.sd_beta = (betas.size() >= 2) ? stats::sample_sd(betas) : 0.0;
    cell.median_abs_t = stats::median(abs_t);
    cell.t_quantiles.reserve(99);
    for (int q = 1; q <= 99; ++q) {
      cell.t_quantiles.push_back(stats::quantile(t_stats, q / 100.0));
    }
  }
  return cells;
}

void write_records_csv(const std::vector<ReplicateRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "replicate,method,fhat_id,n_lab,n_unlab,beta_hat,se,t_stat,p_value,ci_lo,ci_hi,"
         "covered,rejected_at_05,status\n";
  for (const auto& r : records) {
    out << r.replicate << ',' << r.method << ',' << r.fhat_id << ',' << r.n_lab << ','
        << r.n_unlab << ',' << csv::format_double(r.beta_hat) << ',' << csv::format_double(r.se)
        << ',' << csv::format_double(r.t_stat) << ',' << csv::format_double(r.p_value) << ','
        << csv::format_double(r.ci_lo) << ',' << csv::format_double(r.ci_hi) << ','
        << (r.covered ? 1 : 0) << ',' << (r.rejected_at_05 ? 1 : 0) << ',' << r.status << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_summary_csv(const ExperimentSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "method,fhat_id,n_lab,n_unlab,replicates,rejection_rate,coverage,ks_stat,mean_beta,"
         "sd_beta\n";
  for (const auto& c : summary) {
    out << c.method << ',' << c.fhat_id << ',' << c.n_lab << ',' << c.n_unlab << ','
        << c.replicates << ',' << csv::format_double(c.rejection_rate) << ','
        << csv::format_double(c.coverage) << ',' << csv::format_double(c.ks_stat) << ','
        << csv::format_double(c.mean_beta) << ',' << csv::format_double(c.sd_beta) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_qq_csv(const ExperimentSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "method,fhat_id,n_lab,n_unlab,prob,t_quantile\n";
  for (const auto& c : summary) {
    for (std::size_t q = 0; q < c.t_quantiles.size(); ++q) {
      out << c.method << ',' << c.fhat_id << ',' << c.n_lab << ',' << c.n_unlab << ','
          << csv::format_double((q + 1) / 100.0) << ',' << csv::format_double(c.t_quantiles[q])
          << '\n';
    }
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  ExperimentResult result;
  result.records = run_all(config);
  result.summary = summarize(result.records);
  result.records_path = (std::filesystem::path(out_dir) / "records.csv").string();
  result.summary_path = (std::filesystem::path(out_dir) / "summary.csv").string();
  result.qq_path = (std::filesystem::path(out_dir) / "qq.csv").string();
  write_records_csv(result.records, result.records_path);
  write_summary_csv(result.summary, result.summary_path);
  write_qq_csv(result.summary, result.qq_path);
  return result;
}

}  // namespace predinfer::harness
