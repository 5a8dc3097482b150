#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "predinfer/datagen.hpp"
#include "predinfer/predictor.hpp"

using namespace predinfer;
using datagen::GenConfig;
using predictor::PredictorModel;

TEST_CASE("training on a constant response yields a constant predictor") {
  const auto base = datagen::generate(GenConfig::defaults(100, 0.0, 4));
  datagen::LabeledDataset training{Eigen::VectorXd::Constant(100, 2.5), base.Z};
  const auto fhat = predictor::train_fhat(training, "const");
  const auto fresh = datagen::generate(GenConfig::defaults(200, 0.0, 5));
  CHECK((fhat.predict(fresh.Z).array() - 2.5).abs().maxCoeff() < 1e-8);
  CHECK(fhat.id() == "const");
  CHECK(fhat.kind() == PredictorModel::Kind::trained_additive);
}

TEST_CASE("training mse does not exceed the response variance") {
  const auto training = datagen::generate(GenConfig::defaults(300, 1.0, 6));
  const auto fhat = predictor::train_fhat(training);
  const Eigen::VectorXd fitted = fhat.predict(training.Z);
  const double mse = (training.y - fitted).squaredNorm() / training.n();
  const double var_y = (training.y.array() - training.y.mean()).square().sum() / training.n();
  CHECK(mse <= var_y);
}

TEST_CASE("a trained predictor beats the intercept-only predictor out of sample") {
  const GenConfig cfg = GenConfig::defaults(300, 1.0, 7);
  const auto training = datagen::generate(cfg);
  const auto fhat = predictor::train_fhat(training);

  GenConfig fresh_cfg = cfg;
  fresh_cfg.n = 10000;
  fresh_cfg.seed = 70;
  const auto fresh = datagen::generate(fresh_cfg);

  const double mse_fhat = (fresh.y - fhat.predict(fresh.Z)).squaredNorm() / fresh.n();
  const double mse_mean =
      (fresh.y.array() - training.y.mean()).square().sum() / fresh.n();
  CHECK(mse_fhat < mse_mean);
}

TEST_CASE("oracle predictor is the exact conditional mean") {
  const GenConfig cfg = GenConfig::defaults(100000, 1.0, 8);
  const auto fhat = predictor::oracle_fhat(cfg);
  CHECK(fhat.id() == "oracle");
  CHECK(fhat.kind() == PredictorModel::Kind::oracle);

  CHECK(fhat.predict(Eigen::MatrixXd::Zero(1, 4))[0] ==
        doctest::Approx(datagen::true_regression(Eigen::Vector4d::Zero().eval(), cfg)));

  GenConfig zero = cfg;
  zero.coefs = {0.0, 0.0, 0.0, 0.0, 0.0};
  zero.beta1_star = 0.0;
  const auto null_fhat = predictor::oracle_fhat(zero);
  CHECK(null_fhat.predict(Eigen::MatrixXd::Random(10, 4)).cwiseAbs().maxCoeff() == 0.0);

  // prediction error variance equals the noise variance
  const auto d = datagen::generate(cfg);
  const Eigen::VectorXd err = d.y - fhat.predict(d.Z);
  const double v = (err.array() - err.mean()).square().sum() / (d.n() - 1);
  CHECK(v == doctest::Approx(cfg.noise_sd * cfg.noise_sd).epsilon(0.05));
}

TEST_CASE("prediction is deterministic") {
  const auto training = datagen::generate(GenConfig::defaults(200, 0.0, 9));
  const auto fhat = predictor::train_fhat(training);
  const auto fresh = datagen::generate(GenConfig::defaults(500, 0.0, 10));
  const Eigen::VectorXd a = fhat.predict(fresh.Z);
  const Eigen::VectorXd b = fhat.predict(fresh.Z);
  CHECK(a == b);
}

TEST_CASE("custom predictors") {
  const auto fhat = PredictorModel::custom(
      [](const Eigen::MatrixXd& Z) -> Eigen::VectorXd { return Z.col(0); }, "first-column");
  Eigen::MatrixXd Z = Eigen::MatrixXd::Random(6, 4);
  CHECK(fhat.predict(Z) == Z.col(0));
  CHECK(fhat.id() == "first-column");
  CHECK(fhat.kind() == PredictorModel::Kind::custom);

  const auto column = PredictorModel::from_predictions(Eigen::VectorXd::Ones(6), "file-col");
  CHECK(column.predict(Z) == Eigen::VectorXd::Ones(6));
  CHECK_THROWS_AS(column.predict(Eigen::MatrixXd::Random(5, 4)), DimensionMismatch);

  // a predictor returning the wrong length is rejected
  const auto broken = PredictorModel::custom(
      [](const Eigen::MatrixXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Ones(2); }, "bad");
  CHECK_THROWS_AS(broken.predict(Z), DimensionMismatch);
}
