"""Arm-mean estimators and the Wald statistic.

Vectorized helpers (``*_arrays``) work on one entry per simulation and mark
undefined values with NaN; the scalar functions wrap them and return ``None``.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..core.domain import TrialLog
from ..engine.trial import ArmCounts
from ..errors import DataIntegrityError


class EstimatorMethod(str, Enum):
    MLE = "mle"
    IPW = "ipw"


@dataclass(frozen=True)
class Estimate:
    """Estimated arm means; ``None`` when an arm has no usable data."""

    p1_hat: Optional[float]
    p2_hat: Optional[float]
    method: EstimatorMethod

    @property
    def defined(self) -> bool:
        return self.p1_hat is not None and self.p2_hat is not None

    @property
    def difference(self) -> Optional[float]:
        if not self.defined:
            return None
        return self.p1_hat - self.p2_hat


def _to_optional(value: float) -> Optional[float]:
    value = float(value)
    return None if math.isnan(value) else value


def mle_arrays(
    n1: np.ndarray, n2: np.ndarray, s1: np.ndarray, s2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Sample means S_k / n_k, NaN for empty arms."""
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        p1 = np.where(n1 > 0, np.asarray(s1) / n1, np.nan)
        p2 = np.where(n2 > 0, np.asarray(s2) / n2, np.nan)
    return p1, p2


def ipw_arrays(
    arms: np.ndarray, rewards: np.ndarray, pi1: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Self-normalized inverse-probability-weighted arm means.

    For arm k the estimate is sum(r_i d_ik / pi_ik) / sum(d_ik / pi_ik), where
    d_ik marks that participant i was assigned arm k.

    Args:
        arms: Chosen arms, shape (..., horizon)
        rewards: Rewards, same shape
        pi1: Arm-1 assignment probabilities, same shape

    Returns:
        (p1_hat, p2_hat), NaN where an arm was never pulled

    Raises:
        DataIntegrityError: If a pulled arm has recorded probability 0
    """
    arms = np.asarray(arms)
    rewards = np.asarray(rewards, dtype=np.float64)
    pi1 = np.asarray(pi1, dtype=np.float64)
    on_arm1 = arms == 1
    on_arm2 = arms == 2
    pulled_prob = np.where(on_arm1, pi1, 1.0 - pi1)
    if np.any(pulled_prob <= 0.0):
        raise DataIntegrityError("an arm was pulled while its recorded assignment probability is 0")

    inverse = 1.0 / pulled_prob
    estimates = []
    for mask in (on_arm1, on_arm2):
        weights = np.where(mask, inverse, 0.0)
        total = weights.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            estimates.append(np.where(total > 0, (weights * rewards).sum(axis=-1) / total, np.nan))
    return estimates[0], estimates[1]


def wald_arrays(
    p1: np.ndarray, p2: np.ndarray, n1: np.ndarray, n2: np.ndarray
) -> np.ndarray:
    """(p1 - p2) / sqrt(p1(1-p1)/n1 + p2(1-p2)/n2), NaN when undefined."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        variance = p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2
        stat = (p1 - p2) / np.sqrt(variance)
    return np.where(np.isfinite(variance) & (variance > 0), stat, np.nan)


def mle_estimate(counts: ArmCounts) -> Estimate:
    """Per-arm sample means, ignoring how the data were collected."""
    p1, p2 = mle_arrays(counts.n1, counts.n2, counts.s1, counts.s2)
    return Estimate(_to_optional(p1), _to_optional(p2), EstimatorMethod.MLE)


def ipw_estimate(log: TrialLog) -> Estimate:
    """Inverse-probability-weighted arm means from a trial log.

    Raises:
        DataIntegrityError: If a pulled arm has recorded probability 0
    """
    arms, rewards, pi1 = log.as_arrays()
    p1, p2 = ipw_arrays(arms, rewards, pi1)
    return Estimate(_to_optional(p1), _to_optional(p2), EstimatorMethod.IPW)


def wald_statistic(est: Estimate, counts: ArmCounts) -> Optional[float]:
    """Wald statistic for H0: p1 = p2.

    Substituting IPW estimates gives the IPW-adjusted Wald statistic; sample sizes
    are always the observed pull counts.

    Returns:
        The statistic, or ``None`` if an estimate is undefined or the variance is 0
    """
    if not est.defined:
        return None
    return _to_optional(wald_arrays(est.p1_hat, est.p2_hat, counts.n1, counts.n2))
