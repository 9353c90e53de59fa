"""Abstract base class for result storage."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ..core.domain import EnvSpec, TrialLog
from ..inference.calibration import CriticalValues
from ..metrics.summary import CellSummary
from ..policies.spec import PolicySpec


class ResultStore(ABC):
    """Abstract interface for persisting sweep outputs, trial logs and calibrations."""

    @abstractmethod
    def save_summary(self, summaries: Sequence[CellSummary]) -> None:
        """Write one row per (cell, test, params) with its rejection rate.

        Args:
            summaries: Cell summaries in cell order
        """
        pass

    @abstractmethod
    def save_diagnostics(self, summaries: Sequence[CellSummary]) -> None:
        """Write estimator bias and Wald-distribution diagnostics per cell."""
        pass

    @abstractmethod
    def save_rewards(self, summaries: Sequence[CellSummary]) -> None:
        """Write the mean per-participant reward of every cell."""
        pass

    @abstractmethod
    def save_assignment(self, summaries: Sequence[CellSummary]) -> None:
        """Write the final assignment-probability histogram of every cell."""
        pass

    @abstractmethod
    def save_run_config(self, config: Dict[str, Any]) -> None:
        """Write the resolved run configuration next to the results."""
        pass

    @abstractmethod
    def save_trial_logs(self, cell_id: int, logs: Sequence[TrialLog]) -> None:
        """Write the trial logs of one cell.

        Args:
            cell_id: Cell index within the run
            logs: Logs in simulation order
        """
        pass

    @abstractmethod
    def load_trial_log(
        self, path: str, env: Optional[EnvSpec] = None, policy: Optional[PolicySpec] = None
    ) -> List[TrialLog]:
        """Read trial logs from a file, one per distinct ``sim_id``.

        Args:
            path: Trial-log file
            env: Environment to attach, if known
            policy: Policy to attach, if known

        Returns:
            Logs in order of first appearance

        Raises:
            LogParseError: If the file does not conform to the trial-log schema
        """
        pass

    @abstractmethod
    def save_calibration(self, critical: CriticalValues, path: str) -> None:
        """Write a calibration record."""
        pass

    @abstractmethod
    def load_calibration(self, path: str) -> CriticalValues:
        """Read a calibration record.

        Raises:
            CalibrationError: If the record is incomplete
        """
        pass

    @abstractmethod
    def load_summary(self) -> pd.DataFrame:
        """Read back the summary table written by :meth:`save_summary`."""
        pass
