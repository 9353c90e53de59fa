"""Hypothesis tests for a difference between two arm means."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special, stats

from ..engine.trial import ArmCounts
from ..errors import DomainError
from .calibration import CriticalValues
from .estimators import mle_arrays

WALD_CRITICAL = 1.96
WELCH_ALPHA = 0.05
DEFAULT_BF_CUTOFFS = (3.0, 1.0, 0.4)


@dataclass(frozen=True)
class TestOutcome:
    """Result of one test on one experiment.

    Undefined statistics never reject.
    """

    __test__ = False  # not a pytest class

    test_name: str
    statistic: Optional[float]
    reject: bool
    undefined: bool = False
    critical_lower: Optional[float] = None
    critical_upper: Optional[float] = None
    cutoff: Optional[float] = None
    p_value: Optional[float] = None
    df: Optional[float] = None

    def __post_init__(self) -> None:
        if self.reject and self.undefined:
            raise ValueError("an undefined outcome cannot reject")


def _optional(value: float) -> Optional[float]:
    value = float(value)
    return None if math.isnan(value) else value


def threshold_decisions(
    statistics: np.ndarray, lower: float, upper: float
) -> Tuple[np.ndarray, np.ndarray]:
    """(reject, undefined) masks for a two-sided threshold test."""
    statistics = np.asarray(statistics, dtype=np.float64)
    undefined = np.isnan(statistics)
    with np.errstate(invalid="ignore"):
        reject = ~undefined & ((statistics < lower) | (statistics > upper))
    return reject, undefined


def wald_test(
    statistic: Optional[float],
    critical: Optional[CriticalValues] = None,
    test_name: str = "wald",
) -> TestOutcome:
    """Two-sided Wald decision.

    Args:
        statistic: Wald statistic or ``None`` if undefined
        critical: Bounds to compare against; +/- 1.96 when omitted
        test_name: Name recorded on the outcome

    Returns:
        Outcome rejecting iff the statistic lies outside (lower, upper)
    """
    bounds = critical or CriticalValues.fixed(WALD_CRITICAL)
    value = float("nan") if statistic is None else float(statistic)
    reject, undefined = threshold_decisions(np.array([value]), bounds.lower, bounds.upper)
    p_value = None if undefined[0] else float(2.0 * stats.norm.sf(abs(value)))
    return TestOutcome(
        test_name=test_name,
        statistic=_optional(value),
        reject=bool(reject[0]),
        undefined=bool(undefined[0]),
        critical_lower=bounds.lower,
        critical_upper=bounds.upper,
        p_value=p_value,
    )


def welch_arrays(
    n1: np.ndarray, n2: np.ndarray, s1: np.ndarray, s2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Welch statistic (p2_hat - p1_hat) / sqrt(s1^2/n1 + s2^2/n2) and its df.

    Sample variances use the n_k - 1 divisor, s_k^2 = n_k / (n_k - 1) p_k (1 - p_k);
    degrees of freedom follow Welch-Satterthwaite. Both are NaN when an arm has
    fewer than two observations or both sample variances are 0.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    p1, p2 = mle_arrays(n1, n2, s1, s2)
    with np.errstate(divide="ignore", invalid="ignore"):
        v1 = p1 * (1.0 - p1) / (n1 - 1.0)
        v2 = p2 * (1.0 - p2) / (n2 - 1.0)
        total = v1 + v2
        statistic = (p2 - p1) / np.sqrt(total)
        df = total**2 / (v1**2 / (n1 - 1.0) + v2**2 / (n2 - 1.0))
    defined = (n1 >= 2) & (n2 >= 2) & (total > 0)
    return np.where(defined, statistic, np.nan), np.where(defined, df, np.nan)


def welch_critical(df: np.ndarray, alpha: float = WELCH_ALPHA) -> np.ndarray:
    """Two-sided t critical value with ``df`` degrees of freedom (NaN stays NaN)."""
    return stats.t.ppf(1.0 - alpha / 2.0, df)


def welch_test(counts: ArmCounts, alpha: float = WELCH_ALPHA) -> TestOutcome:
    """Welch's unequal-variances t-test at two-sided level ``alpha``."""
    statistic, df = welch_arrays(counts.n1, counts.n2, counts.s1, counts.s2)
    statistic, df = float(statistic), float(df)
    if math.isnan(statistic):
        return TestOutcome(test_name="welch", statistic=None, reject=False, undefined=True)
    critical = float(welch_critical(df, alpha))
    return TestOutcome(
        test_name="welch",
        statistic=statistic,
        reject=abs(statistic) > critical,
        critical_lower=-critical,
        critical_upper=critical,
        p_value=float(2.0 * stats.t.sf(abs(statistic), df)),
        df=df,
    )


def log_bayes_factor_arrays(
    n1: np.ndarray,
    n2: np.ndarray,
    s1: np.ndarray,
    s2: np.ndarray,
    prior_alpha: float = 1.0,
    prior_beta: float = 1.0,
    normalized: bool = True,
) -> np.ndarray:
    """log BF10 comparing separate arm means (H1) with a pooled mean (H0).

    P(D|H1) = B(a + S1, b + n1 - S1) B(a + S2, b + n2 - S2) and
    P(D|H0) = B(2a + S1 + S2, 2b + n - S1 - S2), with the same Beta(a, b) analysis
    prior on each arm. ``normalized`` (the default) divides every marginal by its
    prior's Beta normalizer: B(a, b)^2 for H1 and B(2a, 2b) for H0. With
    ``normalized=False`` the raw Beta-function ratio is returned; under a uniform prior
    it is exactly 6 times the normalized value.
    """
    if prior_alpha <= 0 or prior_beta <= 0:
        raise DomainError("Bayes factor prior parameters must be positive")
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    s1 = np.asarray(s1, dtype=np.float64)
    s2 = np.asarray(s2, dtype=np.float64)
    a, b = prior_alpha, prior_beta
    log_h1 = special.betaln(a + s1, b + n1 - s1) + special.betaln(a + s2, b + n2 - s2)
    log_h0 = special.betaln(2 * a + s1 + s2, 2 * b + n1 + n2 - s1 - s2)
    log_bf = log_h1 - log_h0
    if normalized:
        log_bf = log_bf - 2.0 * special.betaln(a, b) + special.betaln(2 * a, 2 * b)
    return log_bf


def bayes_factor(
    counts: ArmCounts,
    prior_alpha: float = 1.0,
    prior_beta: float = 1.0,
    normalized: bool = True,
) -> float:
    """BF10 for a difference in arm means; larger values favor a difference."""
    return float(
        np.exp(
            log_bayes_factor_arrays(
                counts.n1,
                counts.n2,
                counts.s1,
                counts.s2,
                prior_alpha=prior_alpha,
                prior_beta=prior_beta,
                normalized=normalized,
            )
        )
    )


def bf_test(bf: float, cutoff: float) -> TestOutcome:
    """Reject H0 when BF10 exceeds ``cutoff``."""
    if cutoff <= 0:
        raise DomainError(f"cutoff must be positive, got {cutoff}")
    return TestOutcome(
        test_name="bayes_factor",
        statistic=float(bf),
        reject=bool(bf > cutoff),
        cutoff=float(cutoff),
    )
