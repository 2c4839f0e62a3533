"""Dual Cox model: semi-supervised two-component mixture of Cox PH models."""

from dualcox._core import (
    DualCoxError,
    __version__,
    auc_over_times,
    classification_accuracy,
    fit_cox,
    fit_dual_cox,
    generate_dataset,
    kaplan_meier,
    logrank_test,
    roc_at_time,
)

__all__ = [
    "DualCoxError",
    "__version__",
    "auc_over_times",
    "classification_accuracy",
    "fit_cox",
    "fit_dual_cox",
    "generate_dataset",
    "kaplan_meier",
    "logrank_test",
    "roc_at_time",
]
