"""Aggregation of per-trial outcomes into cell-level summaries."""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.domain import EnvSpec, TrialLog
from ..inference.estimators import Estimate, EstimatorMethod
from ..inference.hypothesis import TestOutcome
from ..policies.spec import PolicySpec

HISTOGRAM_EDGES = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class RejectRate:
    """Rejection proportion with its binomial standard error."""

    rate: float
    se: float
    undefined_count: int
    n_sims: int

    def display(self) -> str:
        """Percentage with SE in parentheses, e.g. ``13.4 % (0.5)``."""
        return f"{100 * self.rate:.1f} % ({100 * self.se:.1f})"


@dataclass(frozen=True)
class AssignmentHistogram:
    """Distribution of the larger final assignment probability over trials."""

    edges: Tuple[float, ...]
    proportions: Tuple[float, ...]
    n_trials: int

    @property
    def labels(self) -> List[str]:
        labels = []
        last = len(self.edges) - 2
        for i, (lo, hi) in enumerate(zip(self.edges[:-1], self.edges[1:])):
            labels.append(f"[{lo:.1f},{hi:.1f}{']' if i == last else ')'}")
        return labels

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.labels, self.proportions))


@dataclass(frozen=True)
class ArmDiagnostics:
    """Moments of one estimated quantity across simulations."""

    mean_estimate: float
    bias: float
    se_estimate: float
    defined: int


@dataclass(frozen=True)
class EstimatorDiagnostics:
    """Bias and spread of one estimator, plus its Wald statistic distribution.

    ``arms`` is keyed by ``"1"``, ``"2"``, ``"diff"`` (p1_hat - p2_hat) and
    ``"absdiff"`` (|p1_hat - p2_hat|); bias for the last two is taken against
    p1 - p2 and |p1 - p2|. Standard errors are those of the mean across simulations.
    """

    method: EstimatorMethod
    arms: Dict[str, ArmDiagnostics]
    mean_wald: float
    median_wald: float
    se_wald: float
    undefined_estimates: int
    undefined_wald: int


@dataclass
class CellSummary:
    """Everything reported for one (policy, environment) cell."""

    policy: PolicySpec
    env: EnvSpec
    n_sims: int
    rejects: Dict[Tuple[str, str], RejectRate] = field(default_factory=dict)
    mean_reward: Tuple[float, float] = (float("nan"), float("nan"))
    diagnostics: List[EstimatorDiagnostics] = field(default_factory=list)
    histogram: Optional[AssignmentHistogram] = None


def _rate_and_se(rejections: int, n: int) -> Tuple[float, float]:
    rate = rejections / n
    return rate, math.sqrt(rate * (1.0 - rate) / n)


def reject_rate_summary(outcomes: Sequence[TestOutcome]) -> RejectRate:
    """Rejection rate of one test across simulations.

    Raises:
        ValueError: If ``outcomes`` is empty or mixes tests
    """
    if not outcomes:
        raise ValueError("cannot summarize an empty list of outcomes")
    names = {o.test_name for o in outcomes}
    if len(names) != 1:
        raise ValueError(f"outcomes mix several tests: {sorted(names)}")
    rejections = sum(o.reject for o in outcomes)
    undefined = sum(o.undefined for o in outcomes)
    rate, se = _rate_and_se(rejections, len(outcomes))
    return RejectRate(rate=rate, se=se, undefined_count=undefined, n_sims=len(outcomes))


def reject_rate_from_masks(reject: np.ndarray, undefined: np.ndarray) -> RejectRate:
    """Same as :func:`reject_rate_summary` for boolean decision arrays."""
    n = len(reject)
    if n == 0:
        raise ValueError("cannot summarize zero simulations")
    rate, se = _rate_and_se(int(np.count_nonzero(reject)), n)
    return RejectRate(rate=rate, se=se, undefined_count=int(np.count_nonzero(undefined)), n_sims=n)


def _superior_probabilities(final_pis: Union[np.ndarray, Iterable]) -> np.ndarray:
    if not isinstance(final_pis, np.ndarray):
        final_pis = list(final_pis)
    values = np.asarray(final_pis, dtype=np.float64)
    if values.ndim == 2:
        superior = values.max(axis=1)
    else:
        superior = np.maximum(values, 1.0 - values)
    return np.clip(superior, 0.5, 1.0)


def assignment_prob_histogram(
    final_pis: Union[np.ndarray, Iterable], edges: Sequence[float] = HISTOGRAM_EDGES
) -> AssignmentHistogram:
    """Bin each trial's larger final assignment probability.

    Args:
        final_pis: (pi1, pi2) pairs, or arm-1 probabilities alone
        edges: Bin edges; bins are half-open except the last, which is closed

    Returns:
        Proportions per bin, summing to 1
    """
    superior = _superior_probabilities(final_pis)
    if superior.size == 0:
        raise ValueError("cannot bin zero trials")
    counts, _ = np.histogram(superior, bins=np.asarray(edges))
    proportions = tuple(float(c) / superior.size for c in counts)
    return AssignmentHistogram(edges=tuple(edges), proportions=proportions, n_trials=superior.size)


def assignment_tail_proportion(final_pis: Union[np.ndarray, Iterable], threshold: float) -> float:
    """Share of trials whose larger final assignment probability is at least ``threshold``."""
    superior = _superior_probabilities(final_pis)
    return float(np.count_nonzero(superior >= threshold)) / superior.size


def _moments(values: np.ndarray, target: float) -> ArmDiagnostics:
    values = values[~np.isnan(values)]
    if values.size == 0:
        return ArmDiagnostics(float("nan"), float("nan"), float("nan"), 0)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else float("nan")
    return ArmDiagnostics(
        mean_estimate=mean, bias=mean - target, se_estimate=se, defined=int(values.size)
    )


def diagnostics_from_arrays(
    p1_hat: np.ndarray,
    p2_hat: np.ndarray,
    env: EnvSpec,
    method: EstimatorMethod,
    wald: Optional[np.ndarray] = None,
) -> EstimatorDiagnostics:
    """Vectorized core of :func:`bias_table`."""
    p1_hat = np.asarray(p1_hat, dtype=np.float64)
    p2_hat = np.asarray(p2_hat, dtype=np.float64)
    difference = p1_hat - p2_hat
    arms = {
        "1": _moments(p1_hat, env.p1),
        "2": _moments(p2_hat, env.p2),
        "diff": _moments(difference, env.p1 - env.p2),
        "absdiff": _moments(np.abs(difference), abs(env.p1 - env.p2)),
    }

    nan = float("nan")
    mean_wald = median_wald = se_wald = nan
    undefined_wald = 0
    if wald is not None:
        wald = np.asarray(wald, dtype=np.float64)
        defined = wald[~np.isnan(wald)]
        undefined_wald = int(wald.size - defined.size)
        if defined.size:
            mean_wald = float(defined.mean())
            median_wald = float(np.median(defined))
        if defined.size > 1:
            se_wald = float(defined.std(ddof=1) / math.sqrt(defined.size))

    return EstimatorDiagnostics(
        method=method,
        arms=arms,
        mean_wald=mean_wald,
        median_wald=median_wald,
        se_wald=se_wald,
        undefined_estimates=int(np.count_nonzero(np.isnan(difference))),
        undefined_wald=undefined_wald,
    )


def bias_table(
    estimates: Sequence[Estimate],
    env: EnvSpec,
    wald_statistics: Optional[Sequence[Optional[float]]] = None,
) -> EstimatorDiagnostics:
    """Bias and standard-error diagnostics of one estimator across simulations.

    Undefined estimates and statistics are left out of the moments and counted.

    Raises:
        ValueError: If ``estimates`` is empty or mixes methods
    """
    if not estimates:
        raise ValueError("cannot summarize an empty list of estimates")
    methods = {e.method for e in estimates}
    if len(methods) != 1:
        raise ValueError("estimates mix several methods")
    nan = float("nan")
    p1 = np.array([nan if e.p1_hat is None else e.p1_hat for e in estimates])
    p2 = np.array([nan if e.p2_hat is None else e.p2_hat for e in estimates])
    wald = None
    if wald_statistics is not None:
        wald = np.array([nan if w is None else w for w in wald_statistics], dtype=np.float64)
    return diagnostics_from_arrays(p1, p2, env, methods.pop(), wald)


def mean_reward_from_array(per_trial: np.ndarray) -> Tuple[float, float]:
    """Mean of per-trial average rewards and its standard error."""
    per_trial = np.asarray(per_trial, dtype=np.float64)
    if per_trial.size == 0:
        raise ValueError("cannot summarize zero trials")
    se = float(per_trial.std(ddof=1) / math.sqrt(per_trial.size)) if per_trial.size > 1 else 0.0
    return float(per_trial.mean()), se


def mean_reward_summary(logs: Sequence[TrialLog]) -> Tuple[float, float]:
    """Average per-participant reward over trials, with its standard error."""
    return mean_reward_from_array(np.array([log.mean_reward() for log in logs]))
