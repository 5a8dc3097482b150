#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "predinfer/linmod.hpp"
#include "predinfer/rng.hpp"

using namespace predinfer;
using linmod::DesignMatrix;
using linmod::ols_fit;
using linmod::SeMode;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, rng::Stream& s) {
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = s.normal();
  }
  return m;
}

Eigen::VectorXd random_vector(Eigen::Index n, rng::Stream& s) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = s.normal();
  return v;
}

}  // namespace

TEST_CASE("exact linear data recovers coefficients with zero residuals") {
  Eigen::VectorXd x(3);
  x << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << 1.0, 3.0, 5.0;
  const auto fit = ols_fit(DesignMatrix::with_intercept(x), y);
  CHECK(fit.beta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(linmod::coefficient_se(fit, 1, SeMode::model) == doctest::Approx(0.0));
}

TEST_CASE("two-point interpolation") {
  Eigen::VectorXd x(2), y(2);
  x << 0.0, 1.0;
  y << 0.0, 1.0;
  const auto fit = ols_fit(DesignMatrix::with_intercept(x), y);
  CHECK(fit.beta[0] == doctest::Approx(0.0));
  CHECK(fit.beta[1] == doctest::Approx(1.0));
  CHECK(fit.sigma2_hat == 0.0);
}

TEST_CASE("matches the direct normal-equation solve") {
  rng::Stream s(11);
  const Eigen::MatrixXd X = random_matrix(50, 3, s);
  const Eigen::VectorXd y = random_vector(50, s);
  const auto fit = ols_fit(DesignMatrix::from_matrix(X), y);

  // independent route: solve X'X beta = X'y directly
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd oracle = xtx.fullPivLu().solve(X.transpose() * y);
  CHECK((fit.beta - oracle).cwiseAbs().maxCoeff() < 1e-10);

  // normal equations hold: X'r = 0 within scaled tolerance
  const double scale = 1e-8 * X.norm() * y.norm();
  CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() < scale);

  // covariance identities against the explicit inverse
  const Eigen::MatrixXd xtx_inv = xtx.inverse();
  const Eigen::MatrixXd model_oracle = fit.sigma2_hat * xtx_inv;
  CHECK((fit.model_cov - model_oracle).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(3, 3);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    meat += fit.residuals[i] * fit.residuals[i] * X.row(i).transpose() * X.row(i);
  }
  const Eigen::MatrixXd sw_oracle = xtx_inv * meat * xtx_inv;
  CHECK((fit.sandwich_cov - sw_oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("model se tracks the closed-form simple-regression se") {
  rng::Stream s(5);
  const Eigen::Index n = 200;
  Eigen::VectorXd x = random_vector(n, s);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = 1.0 + 2.0 * x[i] + s.normal();
  const auto fit = ols_fit(DesignMatrix::with_intercept(x), y);
  const double sxx = (x.array() - x.mean()).square().sum();
  const double closed_form = 1.0 / std::sqrt(sxx);  // known noise sd = 1
  const double se = linmod::coefficient_se(fit, 1, SeMode::model);
  CHECK(se > 0.0);
  CHECK(se == doctest::Approx(closed_form).epsilon(0.30));
}

TEST_CASE("refit of fitted values is idempotent") {
  rng::Stream s(21);
  const Eigen::MatrixXd X = random_matrix(40, 2, s);
  const Eigen::VectorXd y = random_vector(40, s);
  const auto fit = ols_fit(DesignMatrix::from_matrix(X), y);
  const auto refit = ols_fit(DesignMatrix::from_matrix(X), X * fit.beta);
  CHECK((refit.beta - fit.beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(refit.residuals.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("affine equivariance of the slope and its t statistic") {
  rng::Stream s(31);
  Eigen::VectorXd x = random_vector(60, s);
  Eigen::VectorXd y(60);
  for (Eigen::Index i = 0; i < 60; ++i) y[i] = 0.4 * x[i] + s.normal();
  const auto base = ols_fit(DesignMatrix::with_intercept(x), y);
  const double a = 2.5, b = -3.0;
  const auto scaled = ols_fit(DesignMatrix::with_intercept(x), (a * y.array() + b).matrix());
  CHECK(scaled.beta[1] == doctest::Approx(a * base.beta[1]).epsilon(1e-10));
  const double t_base = base.beta[1] / linmod::coefficient_se(base, 1, SeMode::model);
  const double t_scaled = scaled.beta[1] / linmod::coefficient_se(scaled, 1, SeMode::model);
  CHECK(t_scaled == doctest::Approx(t_base).epsilon(1e-10));
}

TEST_CASE("sandwich and model ses agree on average under homoskedastic noise") {
  rng::Stream s(77);
  double sum_model = 0.0, sum_sandwich = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 500;
    Eigen::VectorXd x = random_vector(n, s);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = 0.3 + 0.7 * x[i] + s.normal();
    const auto fit = ols_fit(DesignMatrix::with_intercept(x), y);
    sum_model += linmod::coefficient_se(fit, 1, SeMode::model);
    sum_sandwich += linmod::coefficient_se(fit, 1, SeMode::sandwich);
  }
  const double ratio = sum_sandwich / sum_model;
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("error paths") {
  rng::Stream s(91);
  Eigen::MatrixXd X(20, 2);
  X.col(0) = random_vector(20, s);
  X.col(1) = 2.0 * X.col(0);  // exactly collinear
  CHECK_THROWS_AS(ols_fit(DesignMatrix::from_matrix(X), random_vector(20, s)), RankDeficient);

  Eigen::MatrixXd ok = random_matrix(20, 2, s);
  CHECK_THROWS_AS(ols_fit(DesignMatrix::from_matrix(ok), random_vector(19, s)),
                  DimensionMismatch);
  CHECK_THROWS_AS(DesignMatrix::from_matrix(random_matrix(2, 3, s)), DimensionMismatch);

  const auto fit = ols_fit(DesignMatrix::from_matrix(ok), random_vector(20, s));
  CHECK_THROWS_AS(linmod::coefficient_se(fit, 5, SeMode::model), std::out_of_range);
  CHECK(linmod::coefficient_se(fit, 0, SeMode::sandwich) >= 0.0);
}
