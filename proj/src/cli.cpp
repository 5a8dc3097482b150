#include "predinfer/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "predinfer/csv.hpp"
#include "predinfer/harness.hpp"

namespace predinfer::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream iss(s);
  while (std::getline(iss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "'" + item + "' is not an integer");
    }
  }
  return out;
}

void check_methods(const std::vector<std::string>& methods) {
  const auto& known = harness::known_methods();
  for (const auto& m : methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      std::string valid;
      for (const auto& k : known) valid += (valid.empty() ? "" : ",") + k;
      throw CLI::ValidationError("--methods", "unknown method '" + m + "' (valid: " + valid + ")");
    }
  }
}

inference::NoiseMode parse_noise_mode(const std::string& s) {
  if (s == "gaussian") return inference::NoiseMode::gaussian;
  if (s == "resample") return inference::NoiseMode::resample;
  throw CLI::ValidationError("--noise-mode", "expected 'gaussian' or 'resample'");
}

void print_run_banner(const harness::ExperimentResult& result) {
  std::cout << "wrote " << result.records_path << " (" << result.records.size() << " rows)\n";
  std::cout << "wrote " << result.summary_path << " (" << result.summary.size() << " cells)\n";
  std::cout << "wrote " << result.qq_path << "\n";
}

struct SimulateOptions {
  std::string config_file;
  std::string design = "fixed";
  double beta1 = 0.0;
  std::string n_lab = "300";
  std::string n_unlab = "3000";
  int n_train = 300;
  int replicates = 1000;
  std::string methods;
  int bootstrap_b = 100;
  std::uint64_t seed = 1;
  std::string fhat;
  std::string out_dir = "out";
  double ci_level = 0.95;
  std::string noise_mode = "gaussian";
  int threads = 0;
};

// key=value file mirroring the simulate flags; flags given on the command
// line take precedence over file values.
void apply_config_file(const std::string& path, SimulateOptions& opts, const CLI::App& sim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  const auto overridden = [&sim](const std::string& flag) {
    return sim.count(flag) > 0;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config",
                                 "line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const auto set_num = [&](auto& field) {
      std::istringstream iss(value);
      if (!(iss >> field) || !iss.eof()) {
        throw CLI::ValidationError("--config", "bad value '" + value + "' for key '" + key + "'");
      }
    };
    if (key == "design") {
      if (!overridden("--design")) opts.design = value;
    } else if (key == "beta1") {
      if (!overridden("--beta1")) set_num(opts.beta1);
    } else if (key == "n-lab") {
      if (!overridden("--n-lab")) opts.n_lab = value;
    } else if (key == "n-unlab") {
      if (!overridden("--n-unlab")) opts.n_unlab = value;
    } else if (key == "n-train") {
      if (!overridden("--n-train")) set_num(opts.n_train);
    } else if (key == "replicates") {
      if (!overridden("--replicates")) set_num(opts.replicates);
    } else if (key == "methods") {
      if (!overridden("--methods")) opts.methods = value;
    } else if (key == "bootstrap-b") {
      if (!overridden("--bootstrap-b")) set_num(opts.bootstrap_b);
    } else if (key == "seed") {
      if (!overridden("--seed")) set_num(opts.seed);
    } else if (key == "fhat") {
      if (!overridden("--fhat")) opts.fhat = value;
    } else if (key == "out-dir") {
      if (!overridden("--out-dir")) opts.out_dir = value;
    } else if (key == "ci-level") {
      if (!overridden("--ci-level")) set_num(opts.ci_level);
    } else if (key == "noise-mode") {
      if (!overridden("--noise-mode")) opts.noise_mode = value;
    } else if (key == "threads") {
      if (!overridden("--threads")) set_num(opts.threads);
    } else {
      throw CLI::ValidationError("--config", "unknown key '" + key + "'");
    }
  }
}

void add_simulate(CLI::App& app) {
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo grid and write CSV outputs");
  auto opts = std::make_shared<SimulateOptions>();
  sim->add_option("--config", opts->config_file, "key=value file mirroring the flags");
  sim->add_option("--design", opts->design, "fixed | retrain")
      ->check(CLI::IsMember({"fixed", "retrain"}));
  sim->add_option("--beta1", opts->beta1, "true target slope");
  sim->add_option("--n-lab", opts->n_lab, "labeled sizes, comma separated");
  sim->add_option("--n-unlab", opts->n_unlab, "unlabeled sizes, comma separated");
  sim->add_option("--n-train", opts->n_train, "training set size");
  sim->add_option("--replicates", opts->replicates, "Monte Carlo replicates per grid cell");
  sim->add_option("--methods", opts->methods, "comma separated method tags");
  sim->add_option("--bootstrap-b", opts->bootstrap_b, "bootstrap draws per estimate");
  sim->add_option("--seed", opts->seed, "master seed");
  sim->add_option("--fhat", opts->fhat, "predictor ids (f1,f2,f3,oracle)");
  sim->add_option("--out-dir", opts->out_dir, "output directory");
  sim->add_option("--ci-level", opts->ci_level, "confidence level");
  sim->add_option("--noise-mode", opts->noise_mode, "gaussian | resample")
      ->check(CLI::IsMember({"gaussian", "resample"}));
  sim->add_option("--threads", opts->threads, "worker threads (0 = auto)");

  sim->callback([opts, sim] {
    if (!opts->config_file.empty()) apply_config_file(opts->config_file, *opts, *sim);
    if (opts->design != "fixed" && opts->design != "retrain") {
      throw CLI::ValidationError("--design", "expected 'fixed' or 'retrain'");
    }
    harness::ExperimentConfig cfg;
    cfg.design = (opts->design == "retrain") ? harness::Design::retrain_per_replicate
                                             : harness::Design::fixed_fhat;
    cfg.beta1_star = opts->beta1;
    const auto labs = parse_int_list(opts->n_lab, "--n-lab");
    const auto unlabs = parse_int_list(opts->n_unlab, "--n-unlab");
    if (labs.size() != unlabs.size() || labs.empty()) {
      throw CLI::ValidationError("--n-lab/--n-unlab",
                                 "need equal-length nonempty size lists");
    }
    for (std::size_t i = 0; i < labs.size(); ++i) cfg.n_grid.emplace_back(labs[i], unlabs[i]);
    cfg.n_train = opts->n_train;
    cfg.replicates = opts->replicates;
    if (!opts->methods.empty()) {
      cfg.methods = split_list(opts->methods);
      check_methods(cfg.methods);
    }
    cfg.bootstrap_b = opts->bootstrap_b;
    cfg.master_seed = opts->seed;
    if (!opts->fhat.empty()) {
      cfg.fhat_ids = split_list(opts->fhat);
    } else {
      cfg.fhat_ids = (cfg.design == harness::Design::retrain_per_replicate)
                         ? std::vector<std::string>{"retrained"}
                         : std::vector<std::string>{"f1"};
    }
    cfg.ci_level = opts->ci_level;
    cfg.noise_mode = parse_noise_mode(opts->noise_mode);
    cfg.threads = opts->threads;
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("simulate", e.what());
    }
    print_run_banner(harness::run_experiment(cfg, opts->out_dir));
  });
}

struct PresetOptions {
  std::string name;
  std::optional<int> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<double> beta1;
  std::optional<int> bootstrap_b;
  std::optional<std::string> methods;
  std::optional<std::string> out_dir;
  std::optional<std::string> noise_mode;
  int threads = 0;
};

void add_preset(CLI::App& app) {
  auto* pre = app.add_subcommand("preset", "run a named study configuration");
  auto opts = std::make_shared<PresetOptions>();
  pre->add_option("name", opts->name, "preset name")
      ->required()
      ->check(CLI::IsMember(harness::preset_names()));
  pre->add_option("--replicates", opts->replicates, "override replicate count");
  pre->add_option("--seed", opts->seed, "override master seed");
  pre->add_option("--beta1", opts->beta1, "override the true target slope");
  pre->add_option("--bootstrap-b", opts->bootstrap_b, "override bootstrap draws");
  pre->add_option("--methods", opts->methods, "override method set");
  pre->add_option("--out-dir", opts->out_dir, "output directory (default out/<name>)");
  pre->add_option("--noise-mode", opts->noise_mode, "gaussian | resample")
      ->check(CLI::IsMember({"gaussian", "resample"}));
  pre->add_option("--threads", opts->threads, "worker threads (0 = auto)");

  pre->callback([opts] {
    harness::ExperimentConfig cfg = harness::make_preset(opts->name);
    if (opts->replicates) cfg.replicates = *opts->replicates;
    if (opts->seed) cfg.master_seed = *opts->seed;
    if (opts->beta1) cfg.beta1_star = *opts->beta1;
    if (opts->bootstrap_b) cfg.bootstrap_b = *opts->bootstrap_b;
    if (opts->methods) {
      cfg.methods = split_list(*opts->methods);
      check_methods(cfg.methods);
    }
    if (opts->noise_mode) cfg.noise_mode = parse_noise_mode(*opts->noise_mode);
    cfg.threads = opts->threads;
    const std::string out_dir =
        opts->out_dir ? *opts->out_dir : (std::filesystem::path("out") / opts->name).string();
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("preset", e.what());
    }
    print_run_banner(harness::run_experiment(cfg, out_dir));
  });
}

struct EstimateOptions {
  std::string labeled;
  std::string unlabeled;
  std::string predictions_labeled;
  std::string predictions_unlabeled;
  std::string methods;
  int bootstrap_b = 100;
  std::uint64_t seed = 1;
  double ci_level = 0.95;
  double beta_null = 0.0;
  std::string noise_mode = "gaussian";
};

Eigen::MatrixXd predictors_from(const csv::Table& t, const std::string& path) {
  const char* names[] = {"z1", "z2", "z3", "z4"};
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(t.n_rows()), 4);
  for (int j = 0; j < 4; ++j) {
    if (!t.has_column(names[j])) {
      throw IoError("'" + path + "' is missing required column '" + names[j] + "'");
    }
    Z.col(j) = t.column(names[j]);
  }
  return Z;
}

// A prediction spec is either a column of the dataset file, a standalone
// single-column file, or file:column.
Eigen::VectorXd load_predictions(const std::string& spec, const csv::Table* dataset_table,
                                 const std::string& flag) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string path = spec.substr(0, colon);
    const std::string col = spec.substr(colon + 1);
    return csv::read_table(path).column(col);
  }
  if (std::filesystem::exists(spec)) {
    const csv::Table t = csv::read_table(spec);
    if (t.columns.size() != 1) {
      throw IoError("'" + spec + "' has " + std::to_string(t.columns.size()) +
                    " columns; use " + flag + " file:column to pick one");
    }
    return t.column(t.columns[0]);
  }
  if (dataset_table && dataset_table->has_column(spec)) return dataset_table->column(spec);
  throw IoError(flag + ": '" + spec + "' is neither a file nor a dataset column");
}

void add_estimate(CLI::App& app) {
  auto* est = app.add_subcommand("estimate", "run estimators on user-provided CSV data");
  auto opts = std::make_shared<EstimateOptions>();
  est->add_option("--labeled", opts->labeled, "labeled CSV (y,z1,z2,z3,z4)");
  est->add_option("--unlabeled", opts->unlabeled, "unlabeled CSV (z1,z2,z3,z4)");
  est->add_option("--predictions-labeled", opts->predictions_labeled,
                  "predictions for labeled rows: column, file, or file:column");
  est->add_option("--predictions-unlabeled", opts->predictions_unlabeled,
                  "predictions for unlabeled rows: column, file, or file:column");
  est->add_option("--methods", opts->methods, "comma separated method tags");
  est->add_option("--bootstrap-b", opts->bootstrap_b, "bootstrap draws");
  est->add_option("--seed", opts->seed, "bootstrap seed");
  est->add_option("--ci-level", opts->ci_level, "confidence level");
  est->add_option("--beta-null", opts->beta_null, "null value for the reported test");
  est->add_option("--noise-mode", opts->noise_mode, "gaussian | resample")
      ->check(CLI::IsMember({"gaussian", "resample"}));

  est->callback([opts] {
    std::optional<csv::Table> lab_table, unlab_table;
    std::optional<datagen::LabeledDataset> lab;
    std::optional<datagen::UnlabeledDataset> unlab;
    if (!opts->labeled.empty()) {
      lab_table = csv::read_table(opts->labeled);
      if (!lab_table->has_column("y")) {
        throw IoError("'" + opts->labeled + "' is missing required column 'y'");
      }
      lab = datagen::LabeledDataset{lab_table->column("y"),
                                    predictors_from(*lab_table, opts->labeled)};
    }
    if (!opts->unlabeled.empty()) {
      unlab_table = csv::read_table(opts->unlabeled);
      unlab = datagen::UnlabeledDataset{predictors_from(*unlab_table, opts->unlabeled)};
    }
    std::optional<Eigen::VectorXd> f_lab, f_unlab;
    if (!opts->predictions_labeled.empty()) {
      f_lab = load_predictions(opts->predictions_labeled,
                               lab_table ? &*lab_table : nullptr, "--predictions-labeled");
    }
    if (!opts->predictions_unlabeled.empty()) {
      f_unlab = load_predictions(opts->predictions_unlabeled,
                                 unlab_table ? &*unlab_table : nullptr,
                                 "--predictions-unlabeled");
    }

    const bool explicit_methods = !opts->methods.empty();
    std::vector<std::string> methods =
        explicit_methods ? split_list(opts->methods) : harness::default_methods();
    check_methods(methods);

    const auto need = [&](bool ok, const std::string& m, const std::string& what) {
      if (ok) return true;
      if (explicit_methods) {
        throw CLI::ValidationError("estimate", "method '" + m + "' needs " + what);
      }
      return false;
    };

    const inference::NoiseMode noise = parse_noise_mode(opts->noise_mode);
    std::vector<inference::EstimateReport> reports;
    std::optional<inference::RelationshipModel> rel;
    for (const auto& m : methods) {
      if (m == inference::method::classical) {
        if (!need(lab.has_value(), m, "--labeled")) continue;
        reports.push_back(inference::classical_from(lab->y, lab->x(), opts->ci_level));
      } else if (m == inference::method::naive) {
        if (!need(unlab && f_unlab, m, "--unlabeled and --predictions-unlabeled")) continue;
        reports.push_back(inference::naive_from(*f_unlab, unlab->x(), opts->ci_level));
      } else if (m == inference::method::analytic || m == inference::method::analytic_pub) {
        if (!need(lab && f_lab && unlab && f_unlab, m,
                  "--labeled, --unlabeled and both prediction columns")) {
          continue;
        }
        const auto variant = (m == inference::method::analytic)
                                 ? inference::AnalyticVariant::code
                                 : inference::AnalyticVariant::publication;
        reports.push_back(inference::wang_analytic_from(lab->y, *f_lab, unlab->x(), *f_unlab,
                                                        variant, opts->ci_level));
      } else if (m == inference::method::boot_param || m == inference::method::boot_nonparam) {
        if (!need(lab && f_lab && unlab && f_unlab, m,
                  "--labeled, --unlabeled and both prediction columns")) {
          continue;
        }
        if (!rel) rel = inference::relationship_from(lab->y, *f_lab);
        inference::BootstrapConfig bcfg;
        bcfg.replicates = opts->bootstrap_b;
        bcfg.noise = noise;
        bcfg.ci_level = opts->ci_level;
        rng::Stream stream(opts->seed);
        auto pair = inference::wang_bootstrap_from(*rel, unlab->x(), *f_unlab, bcfg, stream);
        reports.push_back(m == inference::method::boot_param ? std::move(pair.parametric)
                                                             : std::move(pair.nonparametric));
      } else if (m == inference::method::ppi) {
        if (!need(lab && f_lab && unlab && f_unlab, m,
                  "--labeled, --unlabeled and both prediction columns")) {
          continue;
        }
        reports.push_back(
            inference::ppi_from(lab->y, lab->x(), *f_lab, unlab->x(), *f_unlab, opts->ci_level));
      }
    }
    if (reports.empty()) {
      throw CLI::ValidationError("estimate",
                                 "no method is runnable with the provided inputs");
    }

    std::cout << "method,beta_hat,se,t_stat,p_value,ci_lo,ci_hi,n_lab,n_unlab,fhat_id\n";
    for (auto& r : reports) {
      r.fhat_id = "custom";
      std::string t = "nan", p = "nan";
      if (r.se > 0.0) {
        const auto s = inference::report(r, opts->beta_null, opts->ci_level);
        t = csv::format_double(s.t_stat);
        p = csv::format_double(s.p_value);
      }
      std::cout << r.method << ',' << csv::format_double(r.slope()) << ','
                << csv::format_double(r.se) << ',' << t << ',' << p << ','
                << csv::format_double(r.ci_lo) << ',' << csv::format_double(r.ci_hi) << ','
                << r.n_lab << ',' << r.n_unlab << ',' << r.fhat_id << '\n';
    }
  });
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"prediction-based inference estimators and Monte Carlo audit harness"};
  app.require_subcommand(1);
  add_simulate(app);
  add_estimate(app);
  add_preset(app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace predinfer::cli
