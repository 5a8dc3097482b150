#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>

#include "predinfer/errors.hpp"

namespace predinfer::datagen {

// Partially linear additive data model: four independent standard-normal
// predictors, a linear effect of the first one, smooth nonlinear effects of
// the rest, additive Gaussian noise. The covariate of interest is the first
// predictor column.
struct GenConfig {
  int n = 0;
  double beta1_star = 0.0;
  std::array<double, 5> coefs{};  // intercept + one weight per component
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  static GenConfig defaults(int n, double beta1, std::uint64_t seed);
  void validate() const;
};

struct LabeledDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd Z;  // n x 4
  // covariate of interest (first predictor column, shared storage)
  auto x() const { return Z.col(0); }
  Eigen::Index n() const { return Z.rows(); }
};

struct UnlabeledDataset {
  Eigen::MatrixXd Z;
  auto x() const { return Z.col(0); }
  Eigen::Index n() const { return Z.rows(); }
};

// Nonlinear component shapes, centered so each has mean zero under a
// standard-normal input.
double centered_square(double s);
double scaled_sine(double s);
double centered_exp(double s);

LabeledDataset generate(const GenConfig& config);

UnlabeledDataset strip_labels(const LabeledDataset& d);

// Conditional mean of Y given one predictor row (no noise).
double true_regression(const Eigen::Vector4d& z_row, const GenConfig& config);
Eigen::VectorXd true_regression(const Eigen::MatrixXd& Z, const GenConfig& config);

// CSV round trips; labeled header is y,z1,z2,z3,z4 and unlabeled z1,z2,z3,z4.
void write_csv(const LabeledDataset& d, const std::string& path);
void write_csv(const UnlabeledDataset& d, const std::string& path);
LabeledDataset read_labeled_csv(const std::string& path);
UnlabeledDataset read_unlabeled_csv(const std::string& path);

}  // namespace predinfer::datagen
