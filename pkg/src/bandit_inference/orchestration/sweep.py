"""Parallel seeded sweeps over (environment, policy) cells."""

import asyncio
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from ..config import DEFAULT_CHUNK_SIZE, CellConfig, RunConfig
from ..core.domain import EnvSpec
from ..errors import BanditInferenceError, CellFailure
from ..inference.calibration import (
    CriticalValues,
    critical_values_from_statistics,
    validate_calibration_request,
)
from ..metrics.summary import CellSummary
from ..policies.spec import PolicySpec
from ..storage.files import read_calibration
from .evaluation import CellRun, ChunkResult, ChunkTask, evaluate_cell, plan_chunks, simulate_chunk

logger = logging.getLogger(__name__)

ChunkOutcome = Union[ChunkResult, BaseException]
CalibrationKey = Tuple[str, int, float, int, float]
CalibrationOutcome = Union[CriticalValues, BaseException]


@dataclass
class SweepResult:
    """Outcome of a sweep.

    ``summaries`` holds completed cells in configuration order; cells that raised
    are listed in ``failures`` instead.
    """

    config: RunConfig
    summaries: List[CellSummary] = field(default_factory=list)
    failures: List[CellFailure] = field(default_factory=list)
    calibrations: Dict[str, CriticalValues] = field(default_factory=dict)
    runs: Dict[int, CellRun] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class _CalibrationPlan:
    cell_id: int
    env: EnvSpec
    policy: PolicySpec
    n_sims: int
    alpha: float


class SweepService:
    """Fans simulation chunks out to worker processes and assembles cell summaries."""

    def __init__(self, workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE):
        """Initialize sweep service.

        Args:
            workers: Worker processes; 1 runs everything in-process
            chunk_size: Simulations per work unit
        """
        if workers < 1 or chunk_size < 1:
            raise ValueError("workers and chunk_size must be at least 1")
        self.workers = workers
        self.chunk_size = chunk_size

    async def _execute(self, tasks: Sequence[ChunkTask]) -> List[ChunkOutcome]:
        """Run tasks, returning results or exceptions in task order."""
        if self.workers == 1:
            outcomes: List[ChunkOutcome] = []
            for task in tasks:
                try:
                    outcomes.append(simulate_chunk(task))
                except Exception as e:
                    outcomes.append(e)
            return outcomes

        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [loop.run_in_executor(pool, simulate_chunk, task) for task in tasks]
            return list(await asyncio.gather(*futures, return_exceptions=True))

    async def calibrate(
        self,
        null_env: EnvSpec,
        spec: PolicySpec,
        n_sims: int,
        alpha: float,
        base_seed: int,
        cell_id: int = 0,
    ) -> CriticalValues:
        """Parallel counterpart of ``calibrate_critical_values`` with identical output.

        Raises:
            DomainError: If preconditions fail
            CalibrationError: If fewer than half the statistics are defined
        """
        validate_calibration_request(null_env, n_sims, alpha)
        logger.info(
            "Calibrating %s at p=%s, n=%d with %d simulations on %d worker(s)",
            spec.label,
            null_env.p1,
            null_env.horizon,
            n_sims,
            self.workers,
        )
        tasks = plan_chunks(cell_id, null_env, spec, n_sims, base_seed, self.chunk_size)
        outcomes = await self._execute(tasks)
        for outcome in outcomes:
            if isinstance(outcome, BaseException):
                raise outcome
        run = CellRun.from_chunks(cell_id, null_env, spec, outcomes)
        return critical_values_from_statistics(run.mle_wald(), alpha, null_env, spec, base_seed)

    async def run(self, config: RunConfig) -> SweepResult:
        """Simulate every cell of ``config`` and apply its tests.

        In-run calibrations for ``induced_wald`` tests are simulated alongside the
        cells, under cell ids numbered after the last configured cell.

        Returns:
            Summaries of completed cells and a failure per cell that raised
        """
        result = SweepResult(config=config)
        n_cells = len(config.cells)
        logger.info(
            "Starting sweep: %d cell(s) x %d simulation(s) on %d worker(s)",
            n_cells,
            config.n_sims,
            self.workers,
        )

        file_calibrations: Dict[int, CalibrationOutcome] = {}
        plans: Dict[CalibrationKey, _CalibrationPlan] = {}
        for index, test in enumerate(config.tests):
            if test.name != "induced_wald":
                continue
            if test.calibration is not None:
                try:
                    file_calibrations[index] = read_calibration(Path(test.calibration))
                except (BanditInferenceError, OSError) as e:
                    file_calibrations[index] = e
                continue
            for cell in config.cells:
                key = self._calibration_key(cell, test.null_p, test.calibration_sims, test.alpha)
                if key not in plans:
                    plans[key] = _CalibrationPlan(
                        cell_id=n_cells + len(plans),
                        env=EnvSpec(p1=test.null_p, p2=test.null_p, horizon=cell.env.horizon),
                        policy=cell.policy,
                        n_sims=test.calibration_sims,
                        alpha=test.alpha,
                    )

        tasks: List[ChunkTask] = []
        for cell_id, cell in enumerate(config.cells):
            tasks.extend(
                plan_chunks(
                    cell_id,
                    cell.env,
                    cell.policy,
                    config.n_sims,
                    config.base_seed,
                    self.chunk_size,
                    keep_logs=config.save_logs,
                )
            )
        calibration_errors: Dict[CalibrationKey, BaseException] = {}
        for key, plan in plans.items():
            try:
                validate_calibration_request(plan.env, plan.n_sims, plan.alpha)
            except BanditInferenceError as e:
                calibration_errors[key] = e
                continue
            tasks.extend(
                plan_chunks(
                    plan.cell_id,
                    plan.env,
                    plan.policy,
                    plan.n_sims,
                    config.base_seed,
                    self.chunk_size,
                )
            )

        outcomes = await self._execute(tasks)
        chunks: Dict[int, List[ChunkResult]] = defaultdict(list)
        errors: Dict[int, BaseException] = {}
        for task, outcome in zip(tasks, outcomes):
            if isinstance(outcome, BaseException):
                errors.setdefault(task.cell_id, outcome)
            else:
                chunks[task.cell_id].append(outcome)

        calibrated: Dict[CalibrationKey, CalibrationOutcome] = dict(calibration_errors)
        for key, plan in plans.items():
            if key in calibrated:
                continue
            if plan.cell_id in errors:
                calibrated[key] = errors[plan.cell_id]
                continue
            run = CellRun.from_chunks(plan.cell_id, plan.env, plan.policy, chunks[plan.cell_id])
            try:
                critical = critical_values_from_statistics(
                    run.mle_wald(), plan.alpha, plan.env, plan.policy, config.base_seed
                )
            except BanditInferenceError as e:
                calibrated[key] = e
                continue
            calibrated[key] = critical
            result.calibrations[self._calibration_label(key)] = critical
            logger.info(
                "Calibrated %s: lower=%.4f upper=%.4f",
                self._calibration_label(key),
                critical.lower,
                critical.upper,
            )

        for cell_id, cell in enumerate(config.cells):
            try:
                if cell_id in errors:
                    raise errors[cell_id]
                induced = self._induced_for_cell(config, cell, file_calibrations, calibrated)
                run = CellRun.from_chunks(cell_id, cell.env, cell.policy, chunks[cell_id])
                result.summaries.append(evaluate_cell(run, config.tests, induced))
                if config.save_logs:
                    result.runs[cell_id] = run
            except Exception as e:
                failure = CellFailure(cell.label, e)
                logger.error("Cell %d/%d failed: %s", cell_id + 1, n_cells, failure)
                result.failures.append(failure)
                continue
            logger.info("Cell %d/%d complete: %s", cell_id + 1, n_cells, cell.label)

        logger.info(
            "Sweep finished: %d complete, %d failed", len(result.summaries), len(result.failures)
        )
        return result

    @staticmethod
    def _calibration_key(
        cell: CellConfig, null_p: float, n_sims: int, alpha: float
    ) -> CalibrationKey:
        return (cell.policy.label, cell.env.horizon, float(null_p), int(n_sims), float(alpha))

    @staticmethod
    def _calibration_label(key: CalibrationKey) -> str:
        policy, horizon, null_p, n_sims, alpha = key
        return f"{policy}@p={null_p:g},n={horizon},sims={n_sims},alpha={alpha:g}"

    def _induced_for_cell(
        self,
        config: RunConfig,
        cell: CellConfig,
        file_calibrations: Dict[int, CalibrationOutcome],
        calibrated: Dict[CalibrationKey, CalibrationOutcome],
    ) -> Dict[int, CriticalValues]:
        induced: Dict[int, CriticalValues] = {}
        for index, test in enumerate(config.tests):
            if test.name != "induced_wald":
                continue
            if test.calibration is not None:
                value = file_calibrations[index]
            else:
                key = self._calibration_key(cell, test.null_p, test.calibration_sims, test.alpha)
                value = calibrated[key]
            if isinstance(value, BaseException):
                raise value
            if value.calibration_n != cell.env.horizon or value.policy != cell.policy.label:
                logger.warning(
                    "Calibration for %s at n=%s applied to cell %s",
                    value.policy,
                    value.calibration_n,
                    cell.label,
                )
            induced[index] = value
        return induced

