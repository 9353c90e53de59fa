"""Synchronous wrapper for SweepService for scripts and the CLI."""

import asyncio
from typing import Optional

from ..config import RunConfig, get_settings
from ..core.domain import EnvSpec
from ..inference.calibration import CriticalValues
from ..policies.spec import PolicySpec
from .sweep import SweepResult, SweepService


class SyncSweepService:
    """Blocking facade over :class:`SweepService` that owns its event loop.

    Example:
        ```python
        from bandit_inference import RunConfig, SyncSweepService

        service = SyncSweepService(workers=4)
        result = service.run(RunConfig.load("configs/policy_comparison.json"))
        for summary in result.summaries:
            print(summary.policy.label, summary.rejects)
        service.close()
        ```
    """

    def __init__(self, workers: Optional[int] = None, chunk_size: Optional[int] = None):
        """Initialize synchronous sweep service.

        Args:
            workers: Worker processes (defaults to env BANDIT_WORKERS)
            chunk_size: Simulations per work unit (defaults to env BANDIT_CHUNK_SIZE)
        """
        settings = get_settings()
        self._service = SweepService(
            workers=workers or settings.workers,
            chunk_size=chunk_size or settings.chunk_size,
        )
        self._loop: Optional[asyncio.AbstractEventLoop] = None

    @property
    def workers(self) -> int:
        return self._service.workers

    def _ensure_loop(self) -> asyncio.AbstractEventLoop:
        if self._loop is None or self._loop.is_closed():
            self._loop = asyncio.new_event_loop()
        return self._loop

    def run(self, config: RunConfig) -> SweepResult:
        """Run a sweep (synchronous). See :meth:`SweepService.run`."""
        return self._ensure_loop().run_until_complete(self._service.run(config))

    def calibrate(
        self,
        null_env: EnvSpec,
        spec: PolicySpec,
        n_sims: int,
        alpha: float,
        base_seed: int,
        cell_id: int = 0,
    ) -> CriticalValues:
        """Calibrate critical values (synchronous). See :meth:`SweepService.calibrate`."""
        return self._ensure_loop().run_until_complete(
            self._service.calibrate(null_env, spec, n_sims, alpha, base_seed, cell_id)
        )

    def close(self) -> None:
        """Close the event loop."""
        if self._loop is not None and not self._loop.is_closed():
            self._loop.close()
        self._loop = None

    def __enter__(self) -> "SyncSweepService":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()
