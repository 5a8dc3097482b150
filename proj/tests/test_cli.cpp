#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "predinfer/cli.hpp"
#include "predinfer/csv.hpp"
#include "predinfer/datagen.hpp"

using namespace predinfer;
namespace fs = std::filesystem;

namespace {

// Runs the CLI capturing stdout.
int run_capture(const std::vector<std::string>& args, std::string* out) {
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  const int rc = cli::run(args);
  std::cout.rdbuf(old);
  if (out) *out = captured.str();
  return rc;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("preset subcommand writes both csvs") {
  TempDir dir("predinfer_cli_preset");
  std::string out;
  const int rc = run_capture({"preset", "paper-s4-null", "--replicates", "2", "--bootstrap-b",
                              "4", "--seed", "7", "--out-dir", (dir.path / "run").string()},
                             &out);
  CHECK(rc == 0);
  const auto records = csv::read_table((dir.path / "run" / "records.csv").string());
  // replicates x methods x grid x predictors
  CHECK(records.n_rows() == 2u * 6u * 4u * 1u);
  CHECK(fs::exists(dir.path / "run" / "summary.csv"));
  CHECK(fs::exists(dir.path / "run" / "qq.csv"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli::run({"preset", "not-a-preset"}) == 2);
  CHECK(cli::run({"simulate", "--methods", "bogus", "--replicates", "1"}) == 2);
  CHECK(cli::run({"frobnicate"}) == 2);
  CHECK(cli::run({}) == 2);
  CHECK(cli::run({"estimate", "--methods", "ppi"}) == 2);  // inputs missing
}

TEST_CASE("help exits cleanly") {
  std::string out;
  CHECK(run_capture({"--help"}, &out) == 0);
  CHECK(out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate honors an explicit grid") {
  TempDir dir("predinfer_cli_sim");
  std::string out;
  const int rc = run_capture(
      {"simulate", "--design", "fixed", "--fhat", "oracle", "--methods", "classical,ppi",
       "--n-lab", "20,30", "--n-unlab", "40,60", "--replicates", "2", "--seed", "3",
       "--out-dir", (dir.path / "sim").string()},
      &out);
  CHECK(rc == 0);
  const auto records = csv::read_table((dir.path / "sim" / "records.csv").string());
  CHECK(records.n_rows() == 2u * 2u * 2u);
}

TEST_CASE("simulate reads a key=value config file") {
  TempDir dir("predinfer_cli_cfg");
  const auto cfg_path = (dir.path / "run.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "design=fixed\n"
        << "fhat=oracle\n"
        << "methods=classical\n"
        << "n-lab=15\n"
        << "n-unlab=30\n"
        << "replicates=2\n"
        << "seed=11\n"
        << "out-dir=" << (dir.path / "cfgout").string() << "\n";
  }
  CHECK(cli::run({"simulate", "--config", cfg_path}) == 0);
  const auto records = csv::read_table((dir.path / "cfgout" / "records.csv").string());
  CHECK(records.n_rows() == 2u);
}

TEST_CASE("estimate reproduces the reduction identity on user csvs") {
  TempDir dir("predinfer_cli_est");
  const auto lab = datagen::generate(datagen::GenConfig::defaults(60, 1.0, 21));
  const auto unlab = datagen::strip_labels(datagen::generate(datagen::GenConfig::defaults(90, 1.0, 22)));
  const auto lab_path = (dir.path / "lab.csv").string();
  const auto unlab_path = (dir.path / "unlab.csv").string();
  datagen::write_csv(lab, lab_path);
  datagen::write_csv(unlab, unlab_path);

  // standalone single-column prediction files, all zeros
  const auto pl = (dir.path / "pred_lab.csv").string();
  const auto pu = (dir.path / "pred_unlab.csv").string();
  {
    std::ofstream f(pl);
    f << "pred\n";
    for (int i = 0; i < 60; ++i) f << "0\n";
  }
  {
    std::ofstream f(pu);
    f << "pred\n";
    for (int i = 0; i < 90; ++i) f << "0\n";
  }

  std::string out;
  const int rc = run_capture({"estimate", "--labeled", lab_path, "--unlabeled", unlab_path,
                              "--predictions-labeled", pl, "--predictions-unlabeled", pu,
                              "--methods", "classical,ppi"},
                             &out);
  REQUIRE(rc == 0);

  // parse the two output rows and compare the point estimates
  std::istringstream iss(out);
  std::string line;
  std::getline(iss, line);  // header
  double classical_beta = 0.0, ppi_beta = 1.0;
  while (std::getline(iss, line)) {
    std::istringstream row(line);
    std::string method, beta;
    std::getline(row, method, ',');
    std::getline(row, beta, ',');
    if (method == "classical") classical_beta = std::stod(beta);
    if (method == "ppi") ppi_beta = std::stod(beta);
  }
  CHECK(ppi_beta == doctest::Approx(classical_beta).epsilon(1e-10));
}

TEST_CASE("estimate with predictions drawn from a dataset column") {
  TempDir dir("predinfer_cli_est_col");
  const auto unlab = datagen::strip_labels(datagen::generate(datagen::GenConfig::defaults(50, 0.0, 31)));
  // unlabeled csv with an extra prediction column equal to z1
  const auto path = (dir.path / "unlab.csv").string();
  {
    std::ofstream f(path);
    f << "z1,z2,z3,z4,myfit\n";
    for (Eigen::Index i = 0; i < unlab.n(); ++i) {
      for (int j = 0; j < 4; ++j) f << csv::format_double(unlab.Z(i, j)) << ',';
      f << csv::format_double(unlab.Z(i, 0)) << '\n';
    }
  }
  std::string out;
  const int rc = run_capture({"estimate", "--unlabeled", path, "--predictions-unlabeled",
                              "myfit", "--methods", "naive"},
                             &out);
  REQUIRE(rc == 0);
  // regressing z1 on itself: slope 1
  std::istringstream iss(out);
  std::string line;
  std::getline(iss, line);
  std::getline(iss, line);
  std::istringstream row(line);
  std::string method, beta;
  std::getline(row, method, ',');
  std::getline(row, beta, ',');
  CHECK(method == "naive");
  CHECK(std::stod(beta) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("estimate runtime failures exit with code 1") {
  CHECK(cli::run({"estimate", "--labeled", "/nonexistent/file.csv", "--methods", "classical"}) ==
        1);
}
