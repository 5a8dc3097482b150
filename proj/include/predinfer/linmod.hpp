#pragma once

#include <Eigen/Dense>

#include "predinfer/errors.hpp"

namespace predinfer::linmod {

enum class SeMode { model, sandwich };

// Dense regression design. When built through with_intercept() the first
// column is the column of ones and inference on "the slope" means column 1.
class DesignMatrix {
 public:
  static DesignMatrix from_matrix(Eigen::MatrixXd values);
  static DesignMatrix with_intercept(const Eigen::VectorXd& x);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  explicit DesignMatrix(Eigen::MatrixXd values);
  Eigen::MatrixXd values_;
};

struct FittedLinearModel {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd model_cov;     // sigma2_hat * (X'X)^-1
  Eigen::MatrixXd sandwich_cov;  // (X'X)^-1 (sum r_i^2 x_i x_i') (X'X)^-1
  double sigma2_hat = 0.0;       // ||r||^2 / (n - p); 0 for exact interpolation (n == p)
};

// Least squares through a column-pivoted Householder QR. Throws RankDeficient
// when the factorization sees a pivot below 1e-10 times the leading pivot.
FittedLinearModel ols_fit(const DesignMatrix& X, const Eigen::VectorXd& y);

double coefficient_se(const FittedLinearModel& model, Eigen::Index j,
                      SeMode mode = SeMode::model);

}  // namespace predinfer::linmod
