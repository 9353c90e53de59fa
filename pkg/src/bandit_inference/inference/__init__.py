"""Estimators, hypothesis tests and simulation-calibrated critical values."""

from .calibration import (
    CriticalValues,
    calibrate_critical_values,
    critical_values_from_statistics,
    nearest_rank,
    null_wald_statistics,
    validate_calibration_request,
)
from .estimators import (
    Estimate,
    EstimatorMethod,
    ipw_arrays,
    ipw_estimate,
    mle_arrays,
    mle_estimate,
    wald_arrays,
    wald_statistic,
)
from .hypothesis import (
    DEFAULT_BF_CUTOFFS,
    WALD_CRITICAL,
    TestOutcome,
    bayes_factor,
    bf_test,
    log_bayes_factor_arrays,
    threshold_decisions,
    wald_test,
    welch_arrays,
    welch_critical,
    welch_test,
)

__all__ = [
    "Estimate",
    "EstimatorMethod",
    "mle_estimate",
    "ipw_estimate",
    "wald_statistic",
    "mle_arrays",
    "ipw_arrays",
    "wald_arrays",
    "TestOutcome",
    "WALD_CRITICAL",
    "DEFAULT_BF_CUTOFFS",
    "wald_test",
    "welch_test",
    "welch_arrays",
    "welch_critical",
    "bayes_factor",
    "log_bayes_factor_arrays",
    "bf_test",
    "threshold_decisions",
    "CriticalValues",
    "calibrate_critical_values",
    "critical_values_from_statistics",
    "null_wald_statistics",
    "nearest_rank",
    "validate_calibration_request",
]
