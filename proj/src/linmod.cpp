#include "predinfer/linmod.hpp"

#include <cmath>
#include <string>

namespace predinfer::linmod {

DesignMatrix::DesignMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < values_.cols() || values_.cols() < 1) {
    throw DimensionMismatch("DesignMatrix: need rows >= cols >= 1, got " +
                            std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) throw DegenerateInput("DesignMatrix: non-finite entries");
}

DesignMatrix DesignMatrix::from_matrix(Eigen::MatrixXd values) {
  return DesignMatrix(std::move(values));
}

DesignMatrix DesignMatrix::with_intercept(const Eigen::VectorXd& x) {
  Eigen::MatrixXd m(x.size(), 2);
  m.col(0).setOnes();
  m.col(1) = x;
  return DesignMatrix(std::move(m));
}

FittedLinearModel ols_fit(const DesignMatrix& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) {
    throw DimensionMismatch("ols_fit: y has length " + std::to_string(y.size()) +
                            ", design has " + std::to_string(n) + " rows");
  }
  if (!y.allFinite()) throw DegenerateInput("ols_fit: non-finite response");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.values());
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const double max_pivot = std::abs(R(0, 0));
  if (max_pivot == 0.0 || std::abs(R(p - 1, p - 1)) < 1e-10 * max_pivot) {
    throw RankDeficient("ols_fit: (near-)singular X'X, pivot ratio " +
                        std::to_string(max_pivot == 0.0
                                           ? 0.0
                                           : std::abs(R(p - 1, p - 1)) / max_pivot));
  }

  FittedLinearModel fit;
  fit.beta = qr.solve(y);
  fit.residuals = y - X.values() * fit.beta;

  const double rss = fit.residuals.squaredNorm();
  fit.sigma2_hat = (n > p) ? rss / static_cast<double>(n - p) : 0.0;

  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'
  Eigen::MatrixXd r_inv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd xtx_inv = qr.colsPermutation() * (r_inv * r_inv.transpose()) *
                            qr.colsPermutation().transpose();
  xtx_inv = 0.5 * (xtx_inv + xtx_inv.transpose()).eval();

  fit.model_cov = fit.sigma2_hat * xtx_inv;

  const Eigen::ArrayXd r2 = fit.residuals.array().square();
  const Eigen::MatrixXd meat =
      X.values().transpose() * r2.matrix().asDiagonal() * X.values();
  fit.sandwich_cov = xtx_inv * meat * xtx_inv;
  fit.sandwich_cov = 0.5 * (fit.sandwich_cov + fit.sandwich_cov.transpose()).eval();
  return fit;
}

double coefficient_se(const FittedLinearModel& model, Eigen::Index j, SeMode mode) {
  if (j < 0 || j >= model.beta.size()) {
    throw std::out_of_range("coefficient_se: index " + std::to_string(j) +
                            " out of range for " + std::to_string(model.beta.size()) +
                            " coefficients");
  }
  const Eigen::MatrixXd& cov = (mode == SeMode::model) ? model.model_cov : model.sandwich_cov;
  const double v = cov(j, j);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace predinfer::linmod
