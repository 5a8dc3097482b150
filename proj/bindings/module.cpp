#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "predinfer/datagen.hpp"
#include "predinfer/harness.hpp"
#include "predinfer/inference.hpp"
#include "predinfer/linmod.hpp"
#include "predinfer/predictor.hpp"
#include "predinfer/rng.hpp"
#include "predinfer/smoother.hpp"
#include "predinfer/stats.hpp"

namespace py = pybind11;
using namespace predinfer;

namespace {

harness::ExperimentConfig config_with_overrides(harness::ExperimentConfig cfg,
                                                const py::kwargs& kwargs) {
  for (auto item : kwargs) {
    const auto key = item.first.cast<std::string>();
    if (key == "replicates") {
      cfg.replicates = item.second.cast<int>();
    } else if (key == "seed") {
      cfg.master_seed = item.second.cast<std::uint64_t>();
    } else if (key == "beta1") {
      cfg.beta1_star = item.second.cast<double>();
    } else if (key == "bootstrap_b") {
      cfg.bootstrap_b = item.second.cast<int>();
    } else if (key == "methods") {
      cfg.methods = item.second.cast<std::vector<std::string>>();
    } else if (key == "threads") {
      cfg.threads = item.second.cast<int>();
    } else if (key == "noise_mode") {
      const auto mode = item.second.cast<std::string>();
      cfg.noise_mode = (mode == "resample") ? inference::NoiseMode::resample
                                            : inference::NoiseMode::gaussian;
    } else {
      throw py::value_error("unknown override '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "prediction-based inference estimators and Monte Carlo audit harness";

  py::register_exception<Error>(m, "PredinferError");

  // ---- data generation ----
  py::class_<datagen::GenConfig>(m, "GenConfig")
      .def(py::init([](int n, double beta1, std::uint64_t seed) {
             return datagen::GenConfig::defaults(n, beta1, seed);
           }),
           py::arg("n"), py::arg("beta1"), py::arg("seed"))
      .def_readwrite("n", &datagen::GenConfig::n)
      .def_readwrite("beta1_star", &datagen::GenConfig::beta1_star)
      .def_readwrite("coefs", &datagen::GenConfig::coefs)
      .def_readwrite("noise_sd", &datagen::GenConfig::noise_sd)
      .def_readwrite("seed", &datagen::GenConfig::seed);

  py::class_<datagen::LabeledDataset>(m, "LabeledDataset")
      .def(py::init([](Eigen::VectorXd y, Eigen::MatrixXd Z) {
             return datagen::LabeledDataset{std::move(y), std::move(Z)};
           }),
           py::arg("y"), py::arg("Z"))
      .def_readonly("y", &datagen::LabeledDataset::y)
      .def_readonly("Z", &datagen::LabeledDataset::Z)
      .def_property_readonly(
          "x", [](const datagen::LabeledDataset& d) { return Eigen::VectorXd(d.x()); })
      .def_property_readonly("n", &datagen::LabeledDataset::n);

  py::class_<datagen::UnlabeledDataset>(m, "UnlabeledDataset")
      .def(py::init([](Eigen::MatrixXd Z) { return datagen::UnlabeledDataset{std::move(Z)}; }),
           py::arg("Z"))
      .def_readonly("Z", &datagen::UnlabeledDataset::Z)
      .def_property_readonly(
          "x", [](const datagen::UnlabeledDataset& d) { return Eigen::VectorXd(d.x()); })
      .def_property_readonly("n", &datagen::UnlabeledDataset::n);

  m.def("generate", &datagen::generate, py::arg("config"));
  m.def("strip_labels", &datagen::strip_labels, py::arg("labeled"));
  m.def(
      "true_regression",
      [](const Eigen::MatrixXd& Z, const datagen::GenConfig& cfg) {
        return datagen::true_regression(Z, cfg);
      },
      py::arg("Z"), py::arg("config"));
  m.def("write_labeled_csv", [](const datagen::LabeledDataset& d, const std::string& path) {
    datagen::write_csv(d, path);
  });
  m.def("write_unlabeled_csv", [](const datagen::UnlabeledDataset& d, const std::string& path) {
    datagen::write_csv(d, path);
  });
  m.def("read_labeled_csv", &datagen::read_labeled_csv, py::arg("path"));
  m.def("read_unlabeled_csv", &datagen::read_unlabeled_csv, py::arg("path"));

  // ---- least squares ----
  py::class_<linmod::FittedLinearModel>(m, "FittedLinearModel")
      .def_readonly("beta", &linmod::FittedLinearModel::beta)
      .def_readonly("residuals", &linmod::FittedLinearModel::residuals)
      .def_readonly("model_cov", &linmod::FittedLinearModel::model_cov)
      .def_readonly("sandwich_cov", &linmod::FittedLinearModel::sandwich_cov)
      .def_readonly("sigma2_hat", &linmod::FittedLinearModel::sigma2_hat);

  m.def(
      "ols_fit",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool add_intercept) {
        if (add_intercept) {
          if (X.cols() != 1) throw py::value_error("add_intercept expects a single column");
          return linmod::ols_fit(linmod::DesignMatrix::with_intercept(Eigen::VectorXd(X.col(0))),
                                 y);
        }
        return linmod::ols_fit(linmod::DesignMatrix::from_matrix(X), y);
      },
      py::arg("X"), py::arg("y"), py::arg("add_intercept") = false);

  // ---- smoothers ----
  py::class_<smoother::SplineSmoother>(m, "SplineSmoother")
      .def("predict", &smoother::SplineSmoother::predict, py::arg("x"))
      .def_property_readonly("resid_sd", &smoother::SplineSmoother::resid_sd)
      .def_property_readonly("edf", &smoother::SplineSmoother::edf)
      .def_property_readonly("penalty_lambda", &smoother::SplineSmoother::penalty_lambda)
      .def_property_readonly("x_range", &smoother::SplineSmoother::x_range);

  m.def(
      "fit_spline",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return smoother::fit_spline(x, y); },
      py::arg("x"), py::arg("y"));

  py::class_<smoother::AdditiveModel>(m, "AdditiveModel")
      .def_readonly("intercept", &smoother::AdditiveModel::intercept)
      .def_readonly("converged", &smoother::AdditiveModel::converged)
      .def_readonly("n_backfit_iters", &smoother::AdditiveModel::n_backfit_iters)
      .def_readonly("rss_trace", &smoother::AdditiveModel::rss_trace)
      .def("predict", [](const smoother::AdditiveModel& model, const Eigen::MatrixXd& Z) {
        return smoother::predict_additive(model, Z);
      });

  m.def(
      "fit_additive",
      [](const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
        return smoother::fit_additive(Z, y);
      },
      py::arg("Z"), py::arg("y"));

  // ---- predictors ----
  py::class_<predictor::PredictorModel>(m, "PredictorModel")
      .def("predict", &predictor::PredictorModel::predict, py::arg("Z"))
      .def_property_readonly("id", &predictor::PredictorModel::id)
      .def_static(
          "custom",
          [](std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> fn, std::string id) {
            return predictor::PredictorModel::custom(std::move(fn), std::move(id));
          },
          py::arg("fn"), py::arg("id"))
      .def_static("from_predictions", &predictor::PredictorModel::from_predictions,
                  py::arg("predictions"), py::arg("id"));

  m.def(
      "train_fhat",
      [](const datagen::LabeledDataset& training, const std::string& id) {
        return predictor::train_fhat(training, id);
      },
      py::arg("training"), py::arg("id") = "trained");
  m.def("oracle_fhat", &predictor::oracle_fhat, py::arg("config"));

  // ---- estimators ----
  py::class_<inference::EstimateReport>(m, "EstimateReport")
      .def_readonly("method", &inference::EstimateReport::method)
      .def_readonly("beta_hat", &inference::EstimateReport::beta_hat)
      .def_readonly("target_j", &inference::EstimateReport::target_j)
      .def_readonly("se", &inference::EstimateReport::se)
      .def_readonly("ci_level", &inference::EstimateReport::ci_level)
      .def_readonly("ci_lo", &inference::EstimateReport::ci_lo)
      .def_readonly("ci_hi", &inference::EstimateReport::ci_hi)
      .def_readonly("n_lab", &inference::EstimateReport::n_lab)
      .def_readonly("n_unlab", &inference::EstimateReport::n_unlab)
      .def_readonly("fhat_id", &inference::EstimateReport::fhat_id)
      .def_property_readonly("slope", &inference::EstimateReport::slope)
      .def("t_stat_at", &inference::EstimateReport::t_stat_at, py::arg("beta_null"))
      .def("p_value_two_sided", &inference::EstimateReport::p_value_two_sided,
           py::arg("beta_null"))
      .def("__repr__", [](const inference::EstimateReport& r) {
        return "<EstimateReport " + r.method + " slope=" + std::to_string(r.slope()) +
               " se=" + std::to_string(r.se) + ">";
      });

  m.def("estimate_classical", &inference::estimate_classical, py::arg("labeled"),
        py::arg("ci_level") = 0.95);
  m.def("estimate_naive", &inference::estimate_naive, py::arg("unlabeled"), py::arg("fhat"),
        py::arg("ci_level") = 0.95);
  m.def(
      "estimate_wang_analytic",
      [](const datagen::LabeledDataset& lab, const datagen::UnlabeledDataset& unlab,
         const predictor::PredictorModel& fhat, const std::string& variant, double ci_level) {
        const auto v = (variant == "publication") ? inference::AnalyticVariant::publication
                                                  : inference::AnalyticVariant::code;
        return inference::estimate_wang_analytic(lab, unlab, fhat, v, ci_level);
      },
      py::arg("labeled"), py::arg("unlabeled"), py::arg("fhat"), py::arg("variant") = "code",
      py::arg("ci_level") = 0.95);
  m.def(
      "estimate_wang_bootstrap",
      [](const datagen::LabeledDataset& lab, const datagen::UnlabeledDataset& unlab,
         const predictor::PredictorModel& fhat, int replicates, const std::string& se_mode,
         const std::string& noise_mode, std::uint64_t seed, double ci_level) {
        const auto se = (se_mode == "nonparametric") ? inference::BootstrapSe::nonparametric
                                                     : inference::BootstrapSe::parametric;
        const auto noise = (noise_mode == "resample") ? inference::NoiseMode::resample
                                                      : inference::NoiseMode::gaussian;
        rng::Stream stream(seed);
        return inference::estimate_wang_bootstrap(lab, unlab, fhat, replicates, se, noise, stream,
                                                  ci_level);
      },
      py::arg("labeled"), py::arg("unlabeled"), py::arg("fhat"), py::arg("replicates") = 100,
      py::arg("se_mode") = "parametric", py::arg("noise_mode") = "gaussian", py::arg("seed") = 1,
      py::arg("ci_level") = 0.95);
  m.def("estimate_ppi", &inference::estimate_ppi, py::arg("labeled"), py::arg("unlabeled"),
        py::arg("fhat"), py::arg("ci_level") = 0.95);

  // ---- experiment harness ----
  py::class_<harness::ExperimentResult>(m, "ExperimentResult")
      .def_readonly("records_path", &harness::ExperimentResult::records_path)
      .def_readonly("summary_path", &harness::ExperimentResult::summary_path)
      .def_readonly("qq_path", &harness::ExperimentResult::qq_path)
      .def_property_readonly(
          "n_records", [](const harness::ExperimentResult& r) { return r.records.size(); });

  m.def("preset_names", [] { return harness::preset_names(); });
  m.def(
      "run_preset",
      [](const std::string& name, const std::string& out_dir, const py::kwargs& kwargs) {
        const auto cfg = config_with_overrides(harness::make_preset(name), kwargs);
        cfg.validate();
        return harness::run_experiment(cfg, out_dir);
      },
      py::arg("name"), py::arg("out_dir"));

  // ---- small statistical utilities ----
  m.def("std_normal_cdf", &stats::std_normal_cdf);
  m.def("std_normal_quantile", &stats::std_normal_quantile);
  m.def("ks_vs_std_normal",
        [](std::vector<double> v) { return stats::ks_vs_std_normal(std::move(v)); });
  m.def("ks_vs_uniform01",
        [](std::vector<double> v) { return stats::ks_vs_uniform01(std::move(v)); });
}
