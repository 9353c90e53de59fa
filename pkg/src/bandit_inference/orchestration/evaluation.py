"""Chunked simulation and per-cell evaluation of the configured tests.

A chunk is a contiguous range of simulation indices of one cell. Chunks are the unit
of parallel work; their boundaries depend only on the chunk size, and every simulation
derives its stream from ``(base_seed, cell_id, sim_index)``.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import TestConfig
from ..core.domain import EnvSpec, TrialLog
from ..core.rng import derive_stream
from ..engine.trial import TrialBatch, run_trials
from ..inference.calibration import CriticalValues
from ..inference.estimators import EstimatorMethod, ipw_arrays, mle_arrays, wald_arrays
from ..inference.hypothesis import (
    WALD_CRITICAL,
    WELCH_ALPHA,
    log_bayes_factor_arrays,
    threshold_decisions,
    welch_arrays,
    welch_critical,
)
from ..metrics.summary import (
    CellSummary,
    RejectRate,
    assignment_prob_histogram,
    diagnostics_from_arrays,
    mean_reward_from_array,
    reject_rate_from_masks,
)
from ..policies.spec import PolicySpec


@dataclass(frozen=True)
class ChunkTask:
    """One unit of simulation work."""

    cell_id: int
    env: EnvSpec
    policy: PolicySpec
    start: int
    stop: int
    base_seed: int
    keep_logs: bool = False

    @property
    def sim_indices(self) -> range:
        return range(self.start, self.stop)


@dataclass
class ChunkResult:
    """Per-simulation outputs of one chunk, in simulation-index order."""

    cell_id: int
    start: int
    n1: np.ndarray
    n2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    ipw_p1: np.ndarray
    ipw_p2: np.ndarray
    mean_rewards: np.ndarray
    final_pi1: np.ndarray
    batch: Optional[TrialBatch] = None


def plan_chunks(
    cell_id: int,
    env: EnvSpec,
    policy: PolicySpec,
    n_sims: int,
    base_seed: int,
    chunk_size: int,
    keep_logs: bool = False,
) -> List[ChunkTask]:
    """Split ``n_sims`` simulations of a cell into fixed-size chunks."""
    return [
        ChunkTask(
            cell_id=cell_id,
            env=env,
            policy=policy,
            start=start,
            stop=min(start + chunk_size, n_sims),
            base_seed=base_seed,
            keep_logs=keep_logs,
        )
        for start in range(0, n_sims, chunk_size)
    ]


def simulate_chunk(task: ChunkTask) -> ChunkResult:
    """Run one chunk. Top-level so worker processes can unpickle it."""
    streams = [derive_stream(task.base_seed, task.cell_id, i) for i in task.sim_indices]
    batch = run_trials(task.env, task.policy, streams)
    n1, n2, s1, s2 = batch.counts()
    ipw_p1, ipw_p2 = ipw_arrays(batch.arms, batch.rewards, batch.pi1)
    return ChunkResult(
        cell_id=task.cell_id,
        start=task.start,
        n1=n1,
        n2=n2,
        s1=s1,
        s2=s2,
        ipw_p1=ipw_p1,
        ipw_p2=ipw_p2,
        mean_rewards=batch.mean_rewards(),
        final_pi1=batch.final_pi1,
        batch=batch if task.keep_logs else None,
    )


@dataclass
class CellRun:
    """All simulations of one cell, concatenated in simulation-index order."""

    cell_id: int
    env: EnvSpec
    policy: PolicySpec
    n1: np.ndarray
    n2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    ipw_p1: np.ndarray
    ipw_p2: np.ndarray
    mean_rewards: np.ndarray
    final_pi1: np.ndarray
    batches: List[TrialBatch] = field(default_factory=list)

    @classmethod
    def from_chunks(
        cls, cell_id: int, env: EnvSpec, policy: PolicySpec, chunks: Sequence[ChunkResult]
    ) -> "CellRun":
        if not chunks:
            raise ValueError(f"cell {cell_id} has no simulated chunks")
        ordered = sorted(chunks, key=lambda c: c.start)

        def join(name: str) -> np.ndarray:
            return np.concatenate([getattr(c, name) for c in ordered])

        return cls(
            cell_id=cell_id,
            env=env,
            policy=policy,
            n1=join("n1"),
            n2=join("n2"),
            s1=join("s1"),
            s2=join("s2"),
            ipw_p1=join("ipw_p1"),
            ipw_p2=join("ipw_p2"),
            mean_rewards=join("mean_rewards"),
            final_pi1=join("final_pi1"),
            batches=[c.batch for c in ordered if c.batch is not None],
        )

    @property
    def n_sims(self) -> int:
        return len(self.n1)

    def mle(self) -> Tuple[np.ndarray, np.ndarray]:
        return mle_arrays(self.n1, self.n2, self.s1, self.s2)

    def mle_wald(self) -> np.ndarray:
        p1, p2 = self.mle()
        return wald_arrays(p1, p2, self.n1, self.n2)

    def ipw_wald(self) -> np.ndarray:
        return wald_arrays(self.ipw_p1, self.ipw_p2, self.n1, self.n2)

    def logs(self) -> List[TrialLog]:
        """Trial logs of the cell (empty unless chunks kept their batches)."""
        return [log for batch in self.batches for log in batch.logs()]


def _format_number(value: float) -> str:
    return f"{value:.6g}"


def summary_params(test: TestConfig, critical: Optional[CriticalValues] = None) -> List[str]:
    """Parameter strings identifying a test's rows in the summary.

    Bayes-factor tests yield one entry per cutoff, in the configured order.
    """
    if test.name in ("wald", "ipw_wald"):
        return [f"critical={_format_number(WALD_CRITICAL)}"]
    if test.name == "welch":
        return [f"alpha={_format_number(WELCH_ALPHA)}"]
    if test.name == "bayes_factor":
        prior = (
            f"prior_alpha={_format_number(test.prior_alpha)},"
            f"prior_beta={_format_number(test.prior_beta)}"
        )
        suffix = "" if test.normalized else ",normalized=false"
        return [f"cutoff={_format_number(c)},{prior}{suffix}" for c in test.cutoffs]
    if test.name == "induced_wald":
        if critical is None:
            raise ValueError("induced_wald needs critical values")
        null_p = critical.calibration_null_p
        return [
            f"null_p={_format_number(null_p) if null_p is not None else 'NA'},"
            f"lower={_format_number(critical.lower)},upper={_format_number(critical.upper)}"
        ]
    raise ValueError(f"unknown test '{test.name}'")


def evaluate_cell(
    run: CellRun,
    tests: Sequence[TestConfig],
    induced: Optional[Mapping[int, CriticalValues]] = None,
) -> CellSummary:
    """Apply every configured test to a cell's simulations and summarize.

    Args:
        run: Concatenated simulation outputs
        tests: Configured tests
        induced: Critical values for each ``induced_wald`` test, keyed by its
            position in ``tests``

    Returns:
        Rejection rates per (test, params), mean reward, MLE and IPW diagnostics
        and the final assignment-probability histogram
    """
    induced = induced or {}
    mle_p1, mle_p2 = run.mle()
    mle_wald = run.mle_wald()
    ipw_wald = run.ipw_wald()
    rejects: Dict[Tuple[str, str], RejectRate] = {}

    for index, test in enumerate(tests):
        critical = induced.get(index)
        params = summary_params(test, critical)
        if test.name == "wald":
            decisions = threshold_decisions(mle_wald, -WALD_CRITICAL, WALD_CRITICAL)
            rejects[(test.name, params[0])] = reject_rate_from_masks(*decisions)
        elif test.name == "ipw_wald":
            decisions = threshold_decisions(ipw_wald, -WALD_CRITICAL, WALD_CRITICAL)
            rejects[(test.name, params[0])] = reject_rate_from_masks(*decisions)
        elif test.name == "induced_wald":
            decisions = threshold_decisions(mle_wald, critical.lower, critical.upper)
            rejects[(test.name, params[0])] = reject_rate_from_masks(*decisions)
        elif test.name == "welch":
            statistic, df = welch_arrays(run.n1, run.n2, run.s1, run.s2)
            undefined = np.isnan(statistic)
            with np.errstate(invalid="ignore"):
                reject = ~undefined & (np.abs(statistic) > welch_critical(df, WELCH_ALPHA))
            rejects[(test.name, params[0])] = reject_rate_from_masks(reject, undefined)
        elif test.name == "bayes_factor":
            log_bf = log_bayes_factor_arrays(
                run.n1,
                run.n2,
                run.s1,
                run.s2,
                prior_alpha=test.prior_alpha,
                prior_beta=test.prior_beta,
                normalized=test.normalized,
            )
            undefined = np.isnan(log_bf)
            for cutoff, label in zip(test.cutoffs, params):
                with np.errstate(invalid="ignore"):
                    reject = ~undefined & (log_bf > math.log(cutoff))
                rejects[(test.name, label)] = reject_rate_from_masks(reject, undefined)

    return CellSummary(
        policy=run.policy,
        env=run.env,
        n_sims=run.n_sims,
        rejects=rejects,
        mean_reward=mean_reward_from_array(run.mean_rewards),
        diagnostics=[
            diagnostics_from_arrays(mle_p1, mle_p2, run.env, EstimatorMethod.MLE, mle_wald),
            diagnostics_from_arrays(run.ipw_p1, run.ipw_p2, run.env, EstimatorMethod.IPW, ipw_wald),
        ],
        histogram=assignment_prob_histogram(run.final_pi1),
    )
