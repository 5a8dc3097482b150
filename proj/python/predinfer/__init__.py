"""Prediction-based inference estimators with a Monte Carlo audit harness."""

from predinfer._core import (  # noqa: F401
    AdditiveModel,
    EstimateReport,
    ExperimentResult,
    FittedLinearModel,
    GenConfig,
    LabeledDataset,
    PredictorModel,
    PredinferError,
    SplineSmoother,
    UnlabeledDataset,
    estimate_classical,
    estimate_naive,
    estimate_ppi,
    estimate_wang_analytic,
    estimate_wang_bootstrap,
    fit_additive,
    fit_spline,
    generate,
    ks_vs_std_normal,
    ks_vs_uniform01,
    oracle_fhat,
    ols_fit,
    preset_names,
    read_labeled_csv,
    read_unlabeled_csv,
    run_preset,
    std_normal_cdf,
    std_normal_quantile,
    strip_labels,
    train_fhat,
    true_regression,
    write_labeled_csv,
    write_unlabeled_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
