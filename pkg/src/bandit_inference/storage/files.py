"""Flat-file result storage: CSV tables through pandas, JSON calibration records."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.domain import EnvSpec, StepRecord, TrialLog
from ..errors import CalibrationError, DomainError, LogParseError
from ..inference.calibration import CriticalValues
from ..metrics.summary import CellSummary
from ..policies.spec import PolicySpec
from .base import ResultStore

logger = logging.getLogger(__name__)

TRIAL_LOG_COLUMNS = ["sim_id", "t", "arm", "reward", "pi1"]
SUMMARY_COLUMNS = [
    "policy", "p1", "p2", "n", "n_sims", "test", "params", "reject_rate", "se", "undefined_count",
]
DIAGNOSTICS_COLUMNS = [
    "policy", "p1", "p2", "method", "arm", "mean_estimate", "bias", "se_estimate",
    "mean_wald", "median_wald", "se_wald",
]
REWARDS_COLUMNS = ["policy", "p1", "p2", "n", "n_sims", "mean_reward", "se"]
ASSIGNMENT_COLUMNS = ["policy", "p1", "p2", "n", "bin", "proportion"]
CALIBRATION_KEYS = ("null_p", "n", "policy", "n_sims", "alpha", "lower", "upper")

# Enough digits for pi1 to survive a write/read cycle exactly.
PI_FORMAT = "%.17g"
NA = "NA"


def _cell_columns(summary: CellSummary) -> Dict[str, Any]:
    return {"policy": summary.policy.label, "p1": summary.env.p1, "p2": summary.env.p2}


def summary_frame(summaries: Sequence[CellSummary]) -> pd.DataFrame:
    rows = []
    for summary in summaries:
        for (test, params), rate in summary.rejects.items():
            rows.append(
                {
                    **_cell_columns(summary),
                    "n": summary.env.horizon,
                    "n_sims": summary.n_sims,
                    "test": test,
                    "params": params,
                    "reject_rate": rate.rate,
                    "se": rate.se,
                    "undefined_count": rate.undefined_count,
                }
            )
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def diagnostics_frame(summaries: Sequence[CellSummary]) -> pd.DataFrame:
    rows = []
    for summary in summaries:
        for diagnostics in summary.diagnostics:
            for arm, moments in diagnostics.arms.items():
                rows.append(
                    {
                        **_cell_columns(summary),
                        "method": diagnostics.method.value,
                        "arm": arm,
                        "mean_estimate": moments.mean_estimate,
                        "bias": moments.bias,
                        "se_estimate": moments.se_estimate,
                        "mean_wald": diagnostics.mean_wald,
                        "median_wald": diagnostics.median_wald,
                        "se_wald": diagnostics.se_wald,
                    }
                )
    return pd.DataFrame(rows, columns=DIAGNOSTICS_COLUMNS)


def rewards_frame(summaries: Sequence[CellSummary]) -> pd.DataFrame:
    rows = [
        {
            **_cell_columns(s),
            "n": s.env.horizon,
            "n_sims": s.n_sims,
            "mean_reward": s.mean_reward[0],
            "se": s.mean_reward[1],
        }
        for s in summaries
    ]
    return pd.DataFrame(rows, columns=REWARDS_COLUMNS)


def assignment_frame(summaries: Sequence[CellSummary]) -> pd.DataFrame:
    rows = []
    for summary in summaries:
        if summary.histogram is None:
            continue
        for label, proportion in summary.histogram.as_dict().items():
            rows.append(
                {
                    **_cell_columns(summary),
                    "n": summary.env.horizon,
                    "bin": label,
                    "proportion": proportion,
                }
            )
    return pd.DataFrame(rows, columns=ASSIGNMENT_COLUMNS)


def write_trial_logs(path: Path, logs: Sequence[TrialLog]) -> None:
    """Write logs as ``sim_id,t,arm,reward,pi1`` rows."""
    frames = []
    for log in logs:
        arms, rewards, pi1 = log.as_arrays()
        frames.append(
            pd.DataFrame(
                {
                    "sim_id": np.full(len(arms), log.sim_id, dtype=np.int64),
                    "t": [s.t for s in log.steps],
                    "arm": arms.astype(np.int64),
                    "reward": rewards.astype(np.int64),
                    "pi1": pi1,
                },
                columns=TRIAL_LOG_COLUMNS,
            )
        )
    if frames:
        frame = pd.concat(frames, ignore_index=True)
    else:
        frame = pd.DataFrame(columns=TRIAL_LOG_COLUMNS)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=PI_FORMAT)


def _parse_int(raw: str, row: int, column: str) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise LogParseError(f"expected an integer, got {raw!r}", row=row, column=column) from None


def read_trial_logs(
    path: Path, env: Optional[EnvSpec] = None, policy: Optional[PolicySpec] = None
) -> List[TrialLog]:
    """Parse a trial-log CSV into one :class:`TrialLog` per ``sim_id``.

    Row numbers in errors are file line numbers, the header being line 1.

    Raises:
        LogParseError: On a wrong header, a malformed value or non-consecutive steps
        OSError: If the file cannot be read
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise LogParseError("file is empty", row=1) from None
    except pd.errors.ParserError as e:
        raise LogParseError(f"malformed CSV: {e}") from e

    if list(frame.columns) != TRIAL_LOG_COLUMNS:
        raise LogParseError(
            f"expected header {','.join(TRIAL_LOG_COLUMNS)}, "
            f"got {','.join(map(str, frame.columns))}",
            row=1,
        )
    if frame.empty:
        raise LogParseError("log has no steps", row=2)

    steps_by_sim: Dict[int, List[StepRecord]] = {}
    for offset, record in enumerate(frame.itertuples(index=False)):
        row = offset + 2
        sim_id = _parse_int(record.sim_id, row, "sim_id")
        t = _parse_int(record.t, row, "t")
        arm = _parse_int(record.arm, row, "arm")
        reward = _parse_int(record.reward, row, "reward")
        try:
            pi1 = float(record.pi1)
        except ValueError:
            raise LogParseError(
                f"expected a number, got {record.pi1!r}", row=row, column="pi1"
            ) from None
        if math.isnan(pi1):
            raise LogParseError("pi1 is NaN", row=row, column="pi1")

        steps = steps_by_sim.setdefault(sim_id, [])
        if t != len(steps) + 1:
            raise LogParseError(
                f"expected step {len(steps) + 1} for sim_id {sim_id}, got {t}", row=row, column="t"
            )
        if arm not in (1, 2):
            raise LogParseError(f"arm must be 1 or 2, got {arm}", row=row, column="arm")
        if reward not in (0, 1):
            raise LogParseError(f"reward must be 0 or 1, got {reward}", row=row, column="reward")
        try:
            steps.append(StepRecord(t=t, arm=arm, reward=reward, pi1=pi1))
        except DomainError as e:
            raise LogParseError(str(e), row=row, column="pi1") from e

    return [
        TrialLog(env=env, policy=policy, steps=steps, sim_id=sim_id)
        for sim_id, steps in steps_by_sim.items()
    ]


def write_calibration(path: Path, critical: CriticalValues) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(critical.to_record(), indent=2) + "\n")


def read_calibration(path: Path) -> CriticalValues:
    """Load a calibration record written by :func:`write_calibration`.

    Raises:
        CalibrationError: If keys are missing or the bounds are invalid
        OSError: If the file cannot be read
    """
    try:
        record = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise CalibrationError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(record, dict):
        raise CalibrationError(f"{path} must hold a JSON object")
    missing = [key for key in CALIBRATION_KEYS if key not in record]
    if missing:
        raise CalibrationError(f"{path} is missing keys: {', '.join(missing)}")
    try:
        return CriticalValues.from_record(record)
    except (TypeError, ValueError) as e:
        raise CalibrationError(f"{path} holds an invalid calibration record: {e}") from e


class FileResultStore(ResultStore):
    """Results as CSV and JSON files under one output directory."""

    def __init__(self, root: str):
        """Initialize file store.

        Args:
            root: Output directory, created on first write
        """
        self.root = Path(root)

    def _write(self, frame: pd.DataFrame, name: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / name
        frame.to_csv(path, index=False, na_rep=NA)
        logger.debug("Wrote %d rows to %s", len(frame), path)
        return path

    def save_summary(self, summaries: Sequence[CellSummary]) -> None:
        self._write(summary_frame(summaries), "summary.csv")

    def save_diagnostics(self, summaries: Sequence[CellSummary]) -> None:
        self._write(diagnostics_frame(summaries), "diagnostics.csv")

    def save_rewards(self, summaries: Sequence[CellSummary]) -> None:
        self._write(rewards_frame(summaries), "rewards.csv")

    def save_assignment(self, summaries: Sequence[CellSummary]) -> None:
        self._write(assignment_frame(summaries), "assignment.csv")

    def save_run_config(self, config: Dict[str, Any]) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "run_config.json").write_text(json.dumps(config, indent=2) + "\n")

    def save_trial_logs(self, cell_id: int, logs: Sequence[TrialLog]) -> None:
        write_trial_logs(self.root / "logs" / f"cell_{cell_id}.csv", logs)

    def load_trial_log(
        self, path: str, env: Optional[EnvSpec] = None, policy: Optional[PolicySpec] = None
    ) -> List[TrialLog]:
        return read_trial_logs(Path(path), env=env, policy=policy)

    def save_calibration(self, critical: CriticalValues, path: str) -> None:
        write_calibration(Path(path), critical)

    def load_calibration(self, path: str) -> CriticalValues:
        return read_calibration(Path(path))

    def load_summary(self) -> pd.DataFrame:
        return pd.read_csv(self.root / "summary.csv")
