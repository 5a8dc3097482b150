#include "predinfer/predictor.hpp"

#include <memory>
#include <utility>

namespace predinfer::predictor {

PredictorModel::PredictorModel(Kind kind,
                               std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn,
                               std::string id)
    : kind_(kind), fn_(std::move(fn)), id_(std::move(id)) {}

PredictorModel PredictorModel::trained(smoother::AdditiveModel model, std::string id) {
  auto shared = std::make_shared<smoother::AdditiveModel>(std::move(model));
  return PredictorModel(
      Kind::trained_additive,
      [shared](const Eigen::MatrixXd& Z) { return smoother::predict_additive(*shared, Z); },
      std::move(id));
}

PredictorModel PredictorModel::oracle(datagen::GenConfig config) {
  return PredictorModel(
      Kind::oracle,
      [config](const Eigen::MatrixXd& Z) { return datagen::true_regression(Z, config); },
      "oracle");
}

PredictorModel PredictorModel::custom(std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn,
                                      std::string id) {
  return PredictorModel(Kind::custom, std::move(fn), std::move(id));
}

PredictorModel PredictorModel::from_predictions(Eigen::VectorXd predictions, std::string id) {
  auto shared = std::make_shared<Eigen::VectorXd>(std::move(predictions));
  return PredictorModel(
      Kind::custom,
      [shared](const Eigen::MatrixXd& Z) -> Eigen::VectorXd {
        if (Z.rows() != shared->size()) {
          throw DimensionMismatch("precomputed predictions cover " +
                                  std::to_string(shared->size()) + " rows, dataset has " +
                                  std::to_string(Z.rows()));
        }
        return *shared;
      },
      std::move(id));
}

Eigen::VectorXd PredictorModel::predict(const Eigen::MatrixXd& Z) const {
  Eigen::VectorXd out = fn_(Z);
  if (out.size() != Z.rows()) {
    throw DimensionMismatch("predictor '" + id_ + "' returned " + std::to_string(out.size()) +
                            " values for " + std::to_string(Z.rows()) + " rows");
  }
  return out;
}

PredictorModel train_fhat(const datagen::LabeledDataset& training, std::string id,
                          const smoother::AdditiveConfig& config) {
  return PredictorModel::trained(smoother::fit_additive(training.Z, training.y, config),
                                 std::move(id));
}

PredictorModel oracle_fhat(const datagen::GenConfig& config) {
  return PredictorModel::oracle(config);
}

}  // namespace predinfer::predictor
