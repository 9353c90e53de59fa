"""Rendering of summaries and single-log analyses for the command line."""

import math
from typing import Any, Dict, List, Optional

import pandas as pd

from ..core.domain import TrialLog
from ..engine.trial import ArmCounts
from ..inference.estimators import Estimate
from ..inference.hypothesis import TestOutcome
from ..metrics.summary import RejectRate

NA = "NA"


def _value(value: Optional[float]) -> Any:
    """JSON-safe number, ``"NA"`` when undefined."""
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return NA
    return value


def cell_column(policy: str, p1: float, p2: float, n: int) -> str:
    return f"{policy} p1={p1:g} p2={p2:g} n={n}"


def format_reject_table(summary: pd.DataFrame) -> pd.DataFrame:
    """Pivot a summary table into rows of (test, params) and one column per cell.

    Cells read like ``13.4 % (0.5)``: the rejection rate and its standard error,
    both in percent.
    """
    columns: List[str] = []
    rows: Dict[tuple, Dict[str, str]] = {}
    for record in summary.itertuples(index=False):
        column = cell_column(record.policy, record.p1, record.p2, record.n)
        if column not in columns:
            columns.append(column)
        rate = RejectRate(
            rate=record.reject_rate,
            se=record.se,
            undefined_count=int(record.undefined_count),
            n_sims=int(record.n_sims),
        )
        rows.setdefault((record.test, record.params), {})[column] = rate.display()

    table = [
        {"test": test, "params": params, **{c: cells.get(c, "") for c in columns}}
        for (test, params), cells in rows.items()
    ]
    return pd.DataFrame(table, columns=["test", "params", *columns])


def format_reward_table(rewards: pd.DataFrame) -> pd.DataFrame:
    """One row per cell with the mean reward shown as ``0.536 (0.001)``."""
    table = rewards[["policy", "p1", "p2", "n", "n_sims"]].copy()
    table["mean_reward"] = [
        f"{mean:.3f} ({se:.3f})" for mean, se in zip(rewards["mean_reward"], rewards["se"])
    ]
    return table


def format_outcome(outcome: TestOutcome) -> Dict[str, Any]:
    item: Dict[str, Any] = {
        "test": outcome.test_name,
        "statistic": _value(outcome.statistic),
        "reject": outcome.reject,
        "undefined": outcome.undefined,
    }
    if outcome.cutoff is not None:
        item["cutoff"] = outcome.cutoff
    if outcome.critical_lower is not None:
        item["critical"] = [outcome.critical_lower, outcome.critical_upper]
    if outcome.p_value is not None:
        item["p_value"] = outcome.p_value
    if outcome.df is not None:
        item["df"] = outcome.df
    return item


def format_estimate(estimate: Estimate) -> Dict[str, Any]:
    return {
        "p1": _value(estimate.p1_hat),
        "p2": _value(estimate.p2_hat),
        "difference": _value(estimate.difference),
    }


def format_analysis(
    log: TrialLog,
    counts: ArmCounts,
    estimates: List[Estimate],
    outcomes: List[TestOutcome],
) -> Dict[str, Any]:
    """JSON-ready report for one analyzed log."""
    return {
        "sim_id": log.sim_id,
        "horizon": log.horizon,
        "counts": {"n1": counts.n1, "n2": counts.n2, "s1": counts.s1, "s2": counts.s2},
        "estimates": {e.method.value: format_estimate(e) for e in estimates},
        "tests": [format_outcome(o) for o in outcomes],
    }


def format_analysis_text(report: Dict[str, Any]) -> str:
    """Plain-text rendering of :func:`format_analysis` output."""
    counts = report["counts"]
    lines = [
        f"sim_id {report['sim_id']}: n={report['horizon']} "
        f"(arm 1: {counts['s1']}/{counts['n1']}, arm 2: {counts['s2']}/{counts['n2']})"
    ]
    for method, estimate in report["estimates"].items():
        p1, p2 = _short(estimate["p1"]), _short(estimate["p2"])
        lines.append(f"  {method.upper():<4} p1={p1} p2={p2}")
    for test in report["tests"]:
        decision = "reject" if test["reject"] else ("undefined" if test["undefined"] else "retain")
        label = test["test"] if "cutoff" not in test else f"{test['test']} > {test['cutoff']:g}"
        lines.append(f"  {label:<22} {_short(test['statistic']):>10}  {decision}")
    return "\n".join(lines)


def _short(value: Any) -> str:
    if value == NA:
        return NA
    return f"{value:.4f}"
