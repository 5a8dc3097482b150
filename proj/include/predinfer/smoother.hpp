#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "predinfer/errors.hpp"

namespace predinfer::smoother {

struct SmootherConfig {
  int interior_knots = 10;        // placed at empirical quantiles
  double log10_lambda_min = -6.0;
  double log10_lambda_max = 4.0;
  int lambda_grid_points = 21;
  int max_grid_widenings = 2;     // extra 3-decade extensions when the GCV argmin sits on an edge
};

// Cubic penalized regression spline: B-spline basis on quantile knots with a
// second-order difference penalty, lambda selected by GCV. Prediction is the
// basis expansion inside [x_min, x_max] and the boundary tangent line outside.
class SplineSmoother {
 public:
  double predict_one(double x) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;

  // First derivative of the basis expansion; x is clamped into the range.
  double derivative_at(double x) const;

  const std::vector<double>& knots() const { return knots_; }  // clamped knot vector
  const Eigen::VectorXd& basis_coefs() const { return coefs_; }
  double penalty_lambda() const { return lambda_; }
  std::pair<double, double> x_range() const { return {x_min_, x_max_}; }
  double resid_sd() const { return resid_sd_; }
  double edf() const { return edf_; }
  bool gcv_at_grid_edge() const { return gcv_at_grid_edge_; }

  // Adds a constant to the fitted curve (the coefficients); used by the
  // additive model to keep each component mean-centered.
  void shift(double delta) { coefs_.array() += delta; }

 private:
  friend SplineSmoother fit_spline(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                   const SmootherConfig&);
  std::vector<double> knots_;
  Eigen::VectorXd coefs_;
  double lambda_ = 0.0;
  double x_min_ = 0.0, x_max_ = 0.0;
  double resid_sd_ = 0.0;
  double edf_ = 0.0;
  bool gcv_at_grid_edge_ = false;
};

SplineSmoother fit_spline(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          const SmootherConfig& config = {});

inline Eigen::VectorXd predict_spline(const SplineSmoother& s, const Eigen::VectorXd& x) {
  return s.predict(x);
}

struct AdditiveConfig {
  SmootherConfig smoother;
  int max_backfit_iters = 50;
  double tol_factor = 1e-6;  // stop when max component change < tol_factor * sd(y)
};

struct AdditiveModel {
  double intercept = 0.0;
  std::vector<SplineSmoother> components;  // one per predictor column, mean-centered
  bool converged = false;
  int n_backfit_iters = 0;
  std::vector<double> rss_trace;  // training RSS after each backfitting sweep
};

AdditiveModel fit_additive(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                           const AdditiveConfig& config = {});

Eigen::VectorXd predict_additive(const AdditiveModel& m, const Eigen::MatrixXd& Z);

}  // namespace predinfer::smoother
