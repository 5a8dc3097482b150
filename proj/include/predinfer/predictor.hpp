#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "predinfer/datagen.hpp"
#include "predinfer/smoother.hpp"

namespace predinfer::predictor {

// Black-box prediction function over predictor rows. Downstream estimators see
// only predict() and id(); the payload stays private so nothing can peek at
// how predictions are produced.
class PredictorModel {
 public:
  enum class Kind { trained_additive, oracle, custom };

  static PredictorModel trained(smoother::AdditiveModel model, std::string id);
  static PredictorModel oracle(datagen::GenConfig config);
  static PredictorModel custom(std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn,
                               std::string id);
  // Precomputed prediction column for one dataset; predict() checks the row count.
  static PredictorModel from_predictions(Eigen::VectorXd predictions, std::string id);

  Eigen::VectorXd predict(const Eigen::MatrixXd& Z) const;
  const std::string& id() const { return id_; }
  Kind kind() const { return kind_; }

 private:
  PredictorModel(Kind kind, std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn,
                 std::string id);
  Kind kind_;
  std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn_;
  std::string id_;
};

// Fits an additive model to all predictor columns of the training set.
PredictorModel train_fhat(const datagen::LabeledDataset& training, std::string id = "trained",
                          const smoother::AdditiveConfig& config = {});

// The exact conditional mean E[Y | Z] of the generating model.
PredictorModel oracle_fhat(const datagen::GenConfig& config);

}  // namespace predinfer::predictor
