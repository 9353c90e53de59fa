"""Simulation-calibrated critical values for the Wald test under adaptive allocation."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Optional

import numpy as np

from ..core.domain import EnvSpec
from ..core.rng import derive_stream
from ..engine.trial import run_trials
from ..errors import CalibrationError, DomainError
from ..policies.spec import PolicySpec
from .estimators import mle_arrays, wald_arrays

logger = logging.getLogger(__name__)

MIN_CALIBRATION_SIMS = 1000
DEFAULT_CHUNK_SIZE = 250


@dataclass(frozen=True)
class CriticalValues:
    """Two-sided rejection bounds for a Wald statistic.

    ``calibration_sims`` is 0 for fixed (asymptotic) bounds.
    """

    lower: float
    upper: float
    calibration_null_p: Optional[float] = None
    calibration_n: Optional[int] = None
    calibration_sims: int = 0
    undefined_excluded: int = 0
    alpha: float = 0.05
    policy: Optional[str] = None
    base_seed: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise CalibrationError(
                f"lower bound {self.lower} must be below upper bound {self.upper}"
            )

    @classmethod
    def fixed(cls, critical: float = 1.96, alpha: float = 0.05) -> "CriticalValues":
        """Symmetric bounds +/- ``critical``."""
        return cls(lower=-critical, upper=critical, alpha=alpha)

    @property
    def is_calibrated(self) -> bool:
        return self.calibration_sims > 0

    def to_record(self) -> Dict[str, Any]:
        """Serializable calibration record."""
        return {
            "null_p": self.calibration_null_p,
            "n": self.calibration_n,
            "policy": self.policy,
            "n_sims": self.calibration_sims,
            "alpha": self.alpha,
            "lower": self.lower,
            "upper": self.upper,
            "undefined_excluded": self.undefined_excluded,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "CriticalValues":
        """Inverse of :meth:`to_record`.

        Raises:
            KeyError: If a required key is missing
        """
        return cls(
            lower=float(record["lower"]),
            upper=float(record["upper"]),
            calibration_null_p=float(record["null_p"]),
            calibration_n=int(record["n"]),
            calibration_sims=int(record["n_sims"]),
            undefined_excluded=int(record.get("undefined_excluded", 0)),
            alpha=float(record["alpha"]),
            policy=record.get("policy"),
            base_seed=record.get("base_seed"),
        )

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def validate_calibration_request(null_env: EnvSpec, n_sims: int, alpha: float) -> None:
    """Check calibration preconditions.

    Raises:
        DomainError: If the environment is not a null, ``n_sims`` is too small or
            ``alpha`` is not strictly between 0 and 1
    """
    if not null_env.is_null:
        raise DomainError(
            f"calibration needs equal arm means, got p1={null_env.p1}, p2={null_env.p2}"
        )
    if n_sims < MIN_CALIBRATION_SIMS:
        raise DomainError(f"calibration needs at least {MIN_CALIBRATION_SIMS} simulations")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be strictly between 0 and 1, got {alpha}")


def null_wald_statistics(
    null_env: EnvSpec,
    spec: PolicySpec,
    sim_indices: Iterable[int],
    base_seed: int,
    cell_id: int,
) -> np.ndarray:
    """MLE Wald statistics of the given simulations (NaN where undefined)."""
    streams = [derive_stream(base_seed, cell_id, i) for i in sim_indices]
    batch = run_trials(null_env, spec, streams)
    n1, n2, s1, s2 = batch.counts()
    p1, p2 = mle_arrays(n1, n2, s1, s2)
    return wald_arrays(p1, p2, n1, n2)


def nearest_rank(sorted_values: np.ndarray, q: float) -> float:
    """Inverse empirical CDF: the ceil(q * m)-th smallest value (1-based)."""
    m = len(sorted_values)
    rank = min(max(math.ceil(q * m), 1), m)
    return float(sorted_values[rank - 1])


def critical_values_from_statistics(
    statistics: np.ndarray,
    alpha: float,
    null_env: EnvSpec,
    spec: PolicySpec,
    base_seed: int,
) -> CriticalValues:
    """Empirical alpha/2 and 1 - alpha/2 quantiles of simulated null statistics.

    Raises:
        CalibrationError: If fewer than half the statistics are defined
    """
    statistics = np.asarray(statistics, dtype=np.float64)
    n_sims = len(statistics)
    defined = np.sort(statistics[~np.isnan(statistics)])
    undefined = n_sims - len(defined)
    if len(defined) < n_sims / 2:
        raise CalibrationError(
            f"only {len(defined)} of {n_sims} null statistics are defined"
        )
    if undefined:
        logger.info("Excluded %d undefined statistics from calibration", undefined)

    return CriticalValues(
        lower=nearest_rank(defined, alpha / 2.0),
        upper=nearest_rank(defined, 1.0 - alpha / 2.0),
        calibration_null_p=null_env.p1,
        calibration_n=null_env.horizon,
        calibration_sims=n_sims,
        undefined_excluded=undefined,
        alpha=alpha,
        policy=spec.label,
        base_seed=base_seed,
    )


def calibrate_critical_values(
    null_env: EnvSpec,
    spec: PolicySpec,
    n_sims: int,
    alpha: float,
    base_seed: int,
    cell_id: int = 0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CriticalValues:
    """Critical values from the Wald statistic's simulated null distribution.

    Runs ``n_sims`` experiments under ``spec`` at the null environment, computes the
    MLE Wald statistic of each, drops undefined ones and takes nearest-rank
    quantiles. ``SweepService.calibrate`` runs the same chunks in parallel.

    Args:
        null_env: Environment with p1 == p2
        spec: Policy that collects the data
        n_sims: Number of simulated experiments (>= 1000)
        alpha: Two-sided significance level
        base_seed: Run seed
        cell_id: Stream namespace for the calibration simulations
        chunk_size: Simulations per lockstep batch

    Returns:
        Calibrated bounds with full metadata

    Raises:
        DomainError: If preconditions fail
        CalibrationError: If fewer than half the statistics are defined
    """
    validate_calibration_request(null_env, n_sims, alpha)
    logger.info(
        "Calibrating %s at p=%s, n=%d with %d simulations",
        spec.label,
        null_env.p1,
        null_env.horizon,
        n_sims,
    )
    chunks = [
        null_wald_statistics(
            null_env, spec, range(start, min(start + chunk_size, n_sims)), base_seed, cell_id
        )
        for start in range(0, n_sims, chunk_size)
    ]
    return critical_values_from_statistics(
        np.concatenate(chunks), alpha, null_env, spec, base_seed
    )
