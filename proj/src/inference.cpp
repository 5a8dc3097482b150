#include "predinfer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "predinfer/stats.hpp"

namespace predinfer::inference {

using linmod::DesignMatrix;
using linmod::FittedLinearModel;
using linmod::ols_fit;

double EstimateReport::t_stat_at(double beta_null) const {
  if (!(se > 0.0)) throw ZeroSE("t statistic undefined: standard error is zero");
  return (slope() - beta_null) / se;
}

double EstimateReport::p_value_two_sided(double beta_null) const {
  return stats::two_sided_p(t_stat_at(beta_null));
}

TestSummary report(const EstimateReport& est, double beta_null, double ci_level) {
  if (!(est.se > 0.0)) throw ZeroSE("report: standard error is zero");
  TestSummary s;
  s.t_stat = (est.slope() - beta_null) / est.se;
  s.p_value = stats::two_sided_p(s.t_stat);
  const double z = stats::std_normal_quantile(0.5 + ci_level / 2.0);
  s.ci_lo = est.slope() - z * est.se;
  s.ci_hi = est.slope() + z * est.se;
  return s;
}

namespace {

EstimateReport make_report(std::string method, Eigen::VectorXd beta, double se, double ci_level,
                           Eigen::Index n_lab, Eigen::Index n_unlab, std::string fhat_id) {
  EstimateReport r;
  r.method = std::move(method);
  r.beta_hat = std::move(beta);
  r.se = se;
  r.ci_level = ci_level;
  r.n_lab = n_lab;
  r.n_unlab = n_unlab;
  r.fhat_id = std::move(fhat_id);
  const double z = stats::std_normal_quantile(0.5 + ci_level / 2.0);
  r.ci_lo = r.slope() - z * se;
  r.ci_hi = r.slope() + z * se;
  return r;
}

double slope_se(const FittedLinearModel& fit, linmod::SeMode mode) {
  return linmod::coefficient_se(fit, 1, mode);
}

// Sample covariance and variance with the n-1 divisor; the analytic estimator
// only uses their ratio, so the divisor cancels.
double sample_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() / static_cast<double>(a.size() - 1);
}

}  // namespace

EstimateReport classical_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& x_lab,
                              double ci_level) {
  if (y_lab.size() != x_lab.size()) {
    throw DimensionMismatch("classical: y and x lengths differ");
  }
  const FittedLinearModel fit = ols_fit(DesignMatrix::with_intercept(x_lab), y_lab);
  return make_report(method::classical, fit.beta, slope_se(fit, linmod::SeMode::model), ci_level,
                     y_lab.size(), 0, "");
}

EstimateReport naive_from(const Eigen::VectorXd& fhat_unlab, const Eigen::VectorXd& x_unlab,
                          double ci_level) {
  if (fhat_unlab.size() != x_unlab.size()) {
    throw DimensionMismatch("naive: prediction and x lengths differ");
  }
  const FittedLinearModel fit = ols_fit(DesignMatrix::with_intercept(x_unlab), fhat_unlab);
  return make_report(method::naive, fit.beta, slope_se(fit, linmod::SeMode::model), ci_level, 0,
                     x_unlab.size(), "");
}

RelationshipModel relationship_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& fhat_lab,
                                    const smoother::SmootherConfig& config) {
  if (y_lab.size() != fhat_lab.size()) {
    throw DimensionMismatch("relationship model: y and prediction lengths differ");
  }
  RelationshipModel rel;
  rel.ghat = smoother::fit_spline(fhat_lab, y_lab, config);
  const Eigen::VectorXd resid = y_lab - rel.ghat.predict(fhat_lab);
  rel.resid_sd = rel.ghat.resid_sd();
  rel.resid_pool = resid.array() - resid.mean();
  return rel;
}

Eigen::VectorXd sample_outcomes(const RelationshipModel& rel, const Eigen::VectorXd& fhat_values,
                                NoiseMode mode, rng::Stream& stream) {
  Eigen::VectorXd out = rel.ghat.predict(fhat_values);
  if (mode == NoiseMode::gaussian) {
    if (rel.resid_sd > 0.0) {
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += rel.resid_sd * stream.normal();
    }
  } else {
    const auto pool = static_cast<std::size_t>(rel.resid_pool.size());
    if (pool > 0) {
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] += rel.resid_pool[static_cast<Eigen::Index>(stream.index_below(pool))];
      }
    }
  }
  return out;
}

EstimateReport wang_analytic_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& fhat_lab,
                                  const Eigen::VectorXd& x_unlab,
                                  const Eigen::VectorXd& fhat_unlab, AnalyticVariant variant,
                                  double ci_level) {
  if (y_lab.size() != fhat_lab.size()) {
    throw DimensionMismatch("analytic: y and prediction lengths differ");
  }
  const double var_f = sample_cov(fhat_lab, fhat_lab);
  const double scale = std::abs(fhat_lab.mean()) + 1.0;
  if (!(var_f > 1e-20 * scale * scale)) {
    throw DegenerateInput("analytic: predictions on the labeled data have zero variance");
  }
  const double gamma1 = sample_cov(y_lab, fhat_lab) / var_f;

  const DesignMatrix X_unlab = DesignMatrix::with_intercept(x_unlab);
  const FittedLinearModel naive_fit = ols_fit(X_unlab, fhat_unlab);

  Eigen::VectorXd beta;
  if (variant == AnalyticVariant::code) {
    beta = gamma1 * naive_fit.beta;
  } else {
    const double gamma0 = y_lab.mean() - gamma1 * fhat_lab.mean();
    const FittedLinearModel ones_fit =
        ols_fit(X_unlab, Eigen::VectorXd::Ones(x_unlab.size()));
    beta = gamma0 * ones_fit.beta + gamma1 * naive_fit.beta;
  }
  const double se = std::abs(gamma1) * slope_se(naive_fit, linmod::SeMode::model);
  return make_report(variant == AnalyticVariant::code ? method::analytic : method::analytic_pub,
                     std::move(beta), se, ci_level, y_lab.size(), x_unlab.size(), "");
}

BootstrapPair wang_bootstrap_from(const RelationshipModel& rel, const Eigen::VectorXd& x_unlab,
                                  const Eigen::VectorXd& fhat_unlab, const BootstrapConfig& config,
                                  rng::Stream& stream) {
  if (x_unlab.size() != fhat_unlab.size()) {
    throw DimensionMismatch("bootstrap: prediction and x lengths differ");
  }
  if (config.replicates < 1) throw DegenerateInput("bootstrap: need at least one replicate");
  const auto n = static_cast<std::size_t>(x_unlab.size());

  // Predictions are per-row constants, so the spline mean can be evaluated
  // once and indexed by every resample.
  const Eigen::VectorXd mean_at_row = rel.ghat.predict(fhat_unlab);

  std::vector<double> slopes(static_cast<std::size_t>(config.replicates));
  std::vector<double> intercepts(slopes.size());
  std::vector<double> model_ses(slopes.size());

  Eigen::VectorXd xb(x_unlab.size());
  Eigen::VectorXd yb(x_unlab.size());
  const auto pool = static_cast<std::size_t>(rel.resid_pool.size());
  for (int b = 0; b < config.replicates; ++b) {
    for (Eigen::Index i = 0; i < x_unlab.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(stream.index_below(n));
      xb[i] = x_unlab[k];
      double noise = 0.0;
      if (config.noise == NoiseMode::gaussian) {
        if (rel.resid_sd > 0.0) noise = rel.resid_sd * stream.normal();
      } else if (pool > 0) {
        noise = rel.resid_pool[static_cast<Eigen::Index>(stream.index_below(pool))];
      }
      yb[i] = mean_at_row[k] + noise;
    }
    const FittedLinearModel fit = ols_fit(DesignMatrix::with_intercept(xb), yb);
    intercepts[static_cast<std::size_t>(b)] = fit.beta[0];
    slopes[static_cast<std::size_t>(b)] = fit.beta[1];
    model_ses[static_cast<std::size_t>(b)] = slope_se(fit, linmod::SeMode::model);
  }

  Eigen::VectorXd beta(2);
  beta << stats::median(intercepts), stats::median(slopes);

  BootstrapPair pair;
  pair.parametric = make_report(method::boot_param, beta, stats::median(model_ses),
                                config.ci_level, 0, x_unlab.size(), "");
  const double np_se = (config.replicates >= 2) ? stats::sample_sd(slopes) : 0.0;
  pair.nonparametric = make_report(method::boot_nonparam, beta, np_se, config.ci_level, 0,
                                   x_unlab.size(), "");
  return pair;
}

EstimateReport ppi_from(const Eigen::VectorXd& y_lab, const Eigen::VectorXd& x_lab,
                        const Eigen::VectorXd& fhat_lab, const Eigen::VectorXd& x_unlab,
                        const Eigen::VectorXd& fhat_unlab, double ci_level) {
  if (y_lab.size() != x_lab.size() || fhat_lab.size() != x_lab.size()) {
    throw DimensionMismatch("ppi: labeled vector lengths differ");
  }
  if (fhat_unlab.size() != x_unlab.size()) {
    throw DimensionMismatch("ppi: unlabeled vector lengths differ");
  }
  const FittedLinearModel fit_unlab =
      ols_fit(DesignMatrix::with_intercept(x_unlab), fhat_unlab);
  // The debiasing term is one fit of the prediction error on the labeled
  // design; its coefficients equal the difference of the two labeled fits.
  const FittedLinearModel rectifier =
      ols_fit(DesignMatrix::with_intercept(x_lab), y_lab - fhat_lab);

  const Eigen::VectorXd beta = fit_unlab.beta + rectifier.beta;
  const double var_slope = fit_unlab.sandwich_cov(1, 1) + rectifier.sandwich_cov(1, 1);
  return make_report(method::ppi, beta, var_slope > 0.0 ? std::sqrt(var_slope) : 0.0, ci_level,
                     y_lab.size(), x_unlab.size(), "");
}

// ---- dataset-level wrappers ----

EstimateReport estimate_classical(const datagen::LabeledDataset& lab, double ci_level) {
  EstimateReport r = classical_from(lab.y, lab.x(), ci_level);
  return r;
}

EstimateReport estimate_naive(const datagen::UnlabeledDataset& unlab,
                              const predictor::PredictorModel& fhat, double ci_level) {
  EstimateReport r = naive_from(fhat.predict(unlab.Z), unlab.x(), ci_level);
  r.fhat_id = fhat.id();
  return r;
}

RelationshipModel fit_relationship(const datagen::LabeledDataset& lab,
                                   const predictor::PredictorModel& fhat,
                                   const smoother::SmootherConfig& config) {
  return relationship_from(lab.y, fhat.predict(lab.Z), config);
}

EstimateReport estimate_wang_bootstrap(const datagen::LabeledDataset& lab,
                                       const datagen::UnlabeledDataset& unlab,
                                       const predictor::PredictorModel& fhat, int replicates,
                                       BootstrapSe se_mode, NoiseMode noise_mode,
                                       rng::Stream& stream, double ci_level) {
  if (se_mode == BootstrapSe::nonparametric && replicates < 2) {
    throw UndefinedSE("nonparametric bootstrap se needs at least 2 replicates");
  }
  const RelationshipModel rel = fit_relationship(lab, fhat);
  BootstrapConfig config;
  config.replicates = replicates;
  config.noise = noise_mode;
  config.ci_level = ci_level;
  BootstrapPair pair = wang_bootstrap_from(rel, unlab.x(), fhat.predict(unlab.Z), config, stream);
  EstimateReport r = (se_mode == BootstrapSe::parametric) ? std::move(pair.parametric)
                                                          : std::move(pair.nonparametric);
  r.n_lab = lab.n();
  r.fhat_id = fhat.id();
  return r;
}

EstimateReport estimate_wang_analytic(const datagen::LabeledDataset& lab,
                                      const datagen::UnlabeledDataset& unlab,
                                      const predictor::PredictorModel& fhat,
                                      AnalyticVariant variant, double ci_level) {
  EstimateReport r = wang_analytic_from(lab.y, fhat.predict(lab.Z), unlab.x(),
                                        fhat.predict(unlab.Z), variant, ci_level);
  r.fhat_id = fhat.id();
  return r;
}

EstimateReport estimate_ppi(const datagen::LabeledDataset& lab,
                            const datagen::UnlabeledDataset& unlab,
                            const predictor::PredictorModel& fhat, double ci_level) {
  EstimateReport r = ppi_from(lab.y, lab.x(), fhat.predict(lab.Z), unlab.x(),
                              fhat.predict(unlab.Z), ci_level);
  r.fhat_id = fhat.id();
  return r;
}

}  // namespace predinfer::inference
