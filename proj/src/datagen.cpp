#include "predinfer/datagen.hpp"

#include <cmath>
#include <fstream>

#include "predinfer/csv.hpp"
#include "predinfer/rng.hpp"

namespace predinfer::datagen {

GenConfig GenConfig::defaults(int n, double beta1, std::uint64_t seed) {
  GenConfig c;
  c.n = n;
  c.beta1_star = beta1;
  c.coefs = {0.0, beta1, 1.0, 1.0, 1.0};
  c.noise_sd = 1.0;
  c.seed = seed;
  return c;
}

void GenConfig::validate() const {
  if (n < 1) throw DegenerateInput("GenConfig: n must be >= 1");
  if (!(noise_sd > 0.0)) throw DegenerateInput("GenConfig: noise_sd must be > 0");
  if (coefs[1] != beta1_star) {
    throw DegenerateInput("GenConfig: the linear coefficient must equal beta1_star");
  }
}

double centered_square(double s) { return s * s - 1.0; }
double scaled_sine(double s) { return std::sin(2.0 * s); }
double centered_exp(double s) { return std::exp(s) - std::exp(0.5); }

double true_regression(const Eigen::Vector4d& z_row, const GenConfig& config) {
  return config.coefs[0] + config.coefs[1] * z_row[0] +
         config.coefs[2] * centered_square(z_row[1]) +
         config.coefs[3] * scaled_sine(z_row[2]) +
         config.coefs[4] * centered_exp(z_row[3]);
}

Eigen::VectorXd true_regression(const Eigen::MatrixXd& Z, const GenConfig& config) {
  if (Z.cols() != 4) throw DimensionMismatch("true_regression: Z must have 4 columns");
  Eigen::VectorXd out(Z.rows());
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    out[i] = true_regression(Eigen::Vector4d(Z.row(i)), config);
  }
  return out;
}

LabeledDataset generate(const GenConfig& config) {
  config.validate();
  rng::Stream stream(config.seed);
  LabeledDataset d;
  d.Z.resize(config.n, 4);
  for (Eigen::Index i = 0; i < config.n; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) d.Z(i, j) = stream.normal();
  }
  d.y = true_regression(d.Z, config);
  for (Eigen::Index i = 0; i < config.n; ++i) d.y[i] += config.noise_sd * stream.normal();
  return d;
}

UnlabeledDataset strip_labels(const LabeledDataset& d) { return UnlabeledDataset{d.Z}; }

namespace {

void write_rows(std::ofstream& out, const Eigen::VectorXd* y, const Eigen::MatrixXd& Z) {
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    if (y) out << csv::format_double((*y)[i]) << ',';
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      out << csv::format_double(Z(i, j)) << (j + 1 < Z.cols() ? "," : "\n");
    }
  }
}

Eigen::MatrixXd predictors_from_table(const csv::Table& t) {
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(t.n_rows()), 4);
  const char* names[] = {"z1", "z2", "z3", "z4"};
  for (int j = 0; j < 4; ++j) Z.col(j) = t.column(names[j]);
  return Z;
}

}  // namespace

void write_csv(const LabeledDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "y,z1,z2,z3,z4\n";
  write_rows(out, &d.y, d.Z);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_csv(const UnlabeledDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "z1,z2,z3,z4\n";
  write_rows(out, nullptr, d.Z);
  if (!out) throw IoError("failed writing '" + path + "'");
}

LabeledDataset read_labeled_csv(const std::string& path) {
  const csv::Table t = csv::read_table(path);
  LabeledDataset d;
  d.y = t.column("y");
  d.Z = predictors_from_table(t);
  return d;
}

UnlabeledDataset read_unlabeled_csv(const std::string& path) {
  const csv::Table t = csv::read_table(path);
  return UnlabeledDataset{predictors_from_table(t)};
}

}  // namespace predinfer::datagen
