#pragma once

#include <Eigen/Dense>
#include <string>

#include "predinfer/datagen.hpp"
#include "predinfer/linmod.hpp"
#include "predinfer/predictor.hpp"
#include "predinfer/rng.hpp"
#include "predinfer/smoother.hpp"

namespace predinfer::inference {

namespace method {
inline constexpr const char* classical = "classical";
inline constexpr const char* naive = "naive";
inline constexpr const char* analytic = "analytic";
inline constexpr const char* analytic_pub = "analytic_pub";
inline constexpr const char* boot_param = "boot_param";
inline constexpr const char* boot_nonparam = "boot_nonparam";
inline constexpr const char* ppi = "ppi";
}  // namespace method

// One estimator's answer on one dataset pair: the coefficient vector for the
// regression of interest plus the standard error of the target coordinate.
struct EstimateReport {
  std::string method;
  Eigen::VectorXd beta_hat;
  Eigen::Index target_j = 1;  // slope of (1, x)
  double se = 0.0;
  double ci_level = 0.95;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  Eigen::Index n_lab = 0;
  Eigen::Index n_unlab = 0;
  std::string fhat_id;

  double slope() const { return beta_hat[target_j]; }
  double t_stat_at(double beta_null) const;          // ZeroSE when se == 0
  double p_value_two_sided(double beta_null) const;  // ZeroSE when se == 0
};

struct TestSummary {
  double t_stat = 0.0;
  double p_value = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Recomputes the test statistic, two-sided p-value and CI for a given null.
TestSummary report(const EstimateReport& est, double beta_null, double ci_level);

// Fitted conditional law of the outcome given the prediction: a spline mean
// plus a residual noise law (Gaussian with matched sd, or resampling from the
// centered residual pool).
struct RelationshipModel {
  smoother::SplineSmoother ghat;
  double resid_sd = 0.0;
  Eigen::VectorXd resid_pool;  // centered fit residuals
};

enum class NoiseMode { gaussian, resample };
enum class BootstrapSe { parametric, nonparametric };
enum class AnalyticVariant { code, publication };

// ---- estimators on plain vectors (the CLI feeds these from CSV columns) ----

EstimateReport classical_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& x_lab,
                              double ci_level = 0.95);

EstimateReport naive_from(const Eigen::VectorXd& fhat_unlab, const Eigen::VectorXd& x_unlab,
                          double ci_level = 0.95);

RelationshipModel relationship_from(const Eigen::VectorXd& y_lab,
                                    const Eigen::VectorXd& fhat_lab,
                                    const smoother::SmootherConfig& config = {});

EstimateReport wang_analytic_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& fhat_lab,
                                  const Eigen::VectorXd& x_unlab,
                                  const Eigen::VectorXd& fhat_unlab, AnalyticVariant variant,
                                  double ci_level = 0.95);

struct BootstrapConfig {
  int replicates = 100;  // B
  NoiseMode noise = NoiseMode::gaussian;
  double ci_level = 0.95;
};

// One bootstrap pass yields both standard errors (they share the draws).
struct BootstrapPair {
  EstimateReport parametric;
  EstimateReport nonparametric;  // se undefined when B == 1; see wang_bootstrap_from
};

BootstrapPair wang_bootstrap_from(const RelationshipModel& rel, const Eigen::VectorXd& x_unlab,
                                  const Eigen::VectorXd& fhat_unlab, const BootstrapConfig& config,
                                  rng::Stream& stream);

EstimateReport ppi_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& x_lab,
                        const Eigen::VectorXd& fhat_lab, const Eigen::VectorXd& x_unlab,
                        const Eigen::VectorXd& fhat_unlab, double ci_level = 0.95);

// ---- dataset-level entry points ----

EstimateReport estimate_classical(const datagen::LabeledDataset& lab, double ci_level = 0.95);

EstimateReport estimate_naive(const datagen::UnlabeledDataset& unlab,
                              const predictor::PredictorModel& fhat, double ci_level = 0.95);

RelationshipModel fit_relationship(const datagen::LabeledDataset& lab,
                                   const predictor::PredictorModel& fhat,
                                   const smoother::SmootherConfig& config = {});

// Draws outcomes at the given prediction values from the relationship model.
Eigen::VectorXd sample_outcomes(const RelationshipModel& rel, const Eigen::VectorXd& fhat_values,
                                NoiseMode mode, rng::Stream& stream);

EstimateReport estimate_wang_bootstrap(const datagen::LabeledDataset& lab,
                                       const datagen::UnlabeledDataset& unlab,
                                       const predictor::PredictorModel& fhat, int replicates,
                                       BootstrapSe se_mode, NoiseMode noise_mode,
                                       rng::Stream& stream, double ci_level = 0.95);

EstimateReport estimate_wang_analytic(const datagen::LabeledDataset& lab,
                                      const datagen::UnlabeledDataset& unlab,
                                      const predictor::PredictorModel& fhat,
                                      AnalyticVariant variant = AnalyticVariant::code,
                                      double ci_level = 0.95);

EstimateReport estimate_ppi(const datagen::LabeledDataset& lab,
                            const datagen::UnlabeledDataset& unlab,
                            const predictor::PredictorModel& fhat, double ci_level = 0.95);

}  // namespace predinfer::inference
