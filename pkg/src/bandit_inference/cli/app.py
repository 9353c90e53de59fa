"""Command-line interface: run, calibrate, analyze and report."""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ..config import RunConfig, get_settings
from ..core.domain import EnvSpec, TrialLog
from ..engine.trial import summarize
from ..errors import BanditInferenceError, ConfigError
from ..inference.calibration import CriticalValues
from ..inference.estimators import ipw_estimate, mle_estimate, wald_statistic
from ..inference.hypothesis import DEFAULT_BF_CUTOFFS, bayes_factor, bf_test, wald_test, welch_test
from ..metrics.trajectory import trajectory_frame
from ..orchestration.sweep import SweepResult
from ..orchestration.sync_wrapper import SyncSweepService
from ..policies.spec import PolicySpec
from ..storage.base import ResultStore
from ..storage.files import FileResultStore, read_calibration, read_trial_logs, write_calibration
from .formatting import (
    format_analysis,
    format_analysis_text,
    format_reject_table,
    format_reward_table,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CELL_FAILURE = 1
EXIT_ERROR = 2
EXIT_IO_ERROR = 3


def run_command(
    config: RunConfig, store: Optional[ResultStore] = None, workers: Optional[int] = None
) -> SweepResult:
    """Run a sweep and write every result table.

    Args:
        config: Validated run configuration
        store: Destination (defaults to files under ``config.output_dir``)
        workers: Overrides ``config.workers``

    Returns:
        Sweep result; failed cells are listed in ``failures``
    """
    store = store or FileResultStore(config.output_dir)
    service = SyncSweepService(workers=workers or config.workers, chunk_size=config.chunk_size)
    with service:
        result = service.run(config)

    store.save_summary(result.summaries)
    store.save_diagnostics(result.summaries)
    store.save_rewards(result.summaries)
    store.save_assignment(result.summaries)
    store.save_run_config(config.to_dict())
    for cell_id, run in result.runs.items():
        store.save_trial_logs(cell_id, run.logs())
    return result


def calibrate_command(
    null_p: float,
    n: int,
    policy: PolicySpec,
    n_sims: int,
    alpha: float,
    seed: int,
    out: str,
    workers: Optional[int] = None,
) -> CriticalValues:
    """Calibrate TS-induced critical values and write the record to ``out``.

    Raises:
        DomainError: If ``null_p`` or ``alpha`` is out of range or ``n_sims`` < 1000
        CalibrationError: If too many null statistics are undefined
    """
    null_env = EnvSpec(p1=null_p, p2=null_p, horizon=n)
    with SyncSweepService(workers=workers) as service:
        critical = service.calibrate(null_env, policy, n_sims, alpha, seed)
    write_calibration(Path(out), critical)
    return critical


def analyze_log(
    log: TrialLog,
    critical: Optional[CriticalValues] = None,
    bf_cutoffs: Sequence[float] = DEFAULT_BF_CUTOFFS,
) -> Dict[str, Any]:
    """Estimates and every applicable test for one logged experiment.

    Raises:
        DataIntegrityError: If a pulled arm has recorded assignment probability 0
    """
    counts = summarize(log)
    mle = mle_estimate(counts)
    ipw = ipw_estimate(log)
    mle_wald = wald_statistic(mle, counts)
    bf = bayes_factor(counts)
    outcomes = [
        wald_test(mle_wald),
        welch_test(counts),
        *[bf_test(bf, cutoff) for cutoff in bf_cutoffs],
        wald_test(wald_statistic(ipw, counts), test_name="ipw_wald"),
    ]
    if critical is not None:
        outcomes.append(wald_test(mle_wald, critical, test_name="induced_wald"))
    return format_analysis(log, counts, [mle, ipw], outcomes)


def analyze_command(
    log_file: str,
    calibration: Optional[str] = None,
    out: Optional[str] = None,
    trajectory: Optional[str] = None,
) -> List[Dict[str, Any]]:
    """Analyze an externally logged experiment.

    Args:
        log_file: Trial-log CSV (one or more ``sim_id`` values)
        calibration: Calibration record enabling the induced Wald test
        out: JSON report destination
        trajectory: CSV destination for the per-step running means and intervals

    Returns:
        One report per logged experiment

    Raises:
        LogParseError: If the file does not follow the trial-log schema
        DataIntegrityError: If a pulled arm has recorded assignment probability 0
    """
    logs = read_trial_logs(Path(log_file))
    critical = read_calibration(Path(calibration)) if calibration else None
    reports = [analyze_log(log, critical) for log in logs]

    if out is not None:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(json.dumps(reports, indent=2) + "\n")
    if trajectory is not None:
        frames = [trajectory_frame(log).assign(sim_id=log.sim_id) for log in logs]
        frame = pd.concat(frames, ignore_index=True)
        frame = frame[["sim_id", *[c for c in frame.columns if c != "sim_id"]]]
        Path(trajectory).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(trajectory, index=False, na_rep="NA")
    return reports


def report_command(in_dir: str, fmt: str = "csv", table: str = "summary") -> str:
    """Render a finished run's results as a display table.

    Args:
        in_dir: Output directory of a ``run``
        fmt: ``csv`` or ``json``
        table: ``summary`` (rejection rates) or ``rewards``

    Raises:
        ConfigError: On an unknown format or table
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown report format '{fmt}'")
    store = FileResultStore(in_dir)
    if table == "summary":
        frame = format_reject_table(store.load_summary())
    elif table == "rewards":
        frame = format_reward_table(pd.read_csv(Path(in_dir) / "rewards.csv"))
    else:
        raise ConfigError(f"unknown report table '{table}'")

    if fmt == "json":
        return frame.to_json(orient="records", indent=2)
    return frame.to_csv(index=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandit-inference",
        description=(
            "Simulate two-arm adaptive experiments and evaluate hypothesis tests "
            "on the collected data."
        ),
    )
    parser.add_argument("--log-level", help="Logging level (defaults to env BANDIT_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a sweep from a JSON config")
    run.add_argument("--config", required=True, help="Run configuration file")
    run.add_argument("--seed", type=int, help="Override the base seed")
    run.add_argument("--workers", type=int, help="Override the worker count")
    run.add_argument("--out", help="Output directory (defaults to the config or BANDIT_OUTPUT_DIR)")

    calibrate = commands.add_parser("calibrate", help="Calibrate induced Wald critical values")
    calibrate.add_argument("--p0", type=float, required=True, help="Common arm mean under the null")
    calibrate.add_argument("--n", type=int, required=True, help="Participants per experiment")
    calibrate.add_argument(
        "--policy", default="ts", help="Policy spec, e.g. ts or ts:alpha=0.5,beta=0.5"
    )
    calibrate.add_argument("--sims", type=int, default=5000, help="Simulated null experiments")
    calibrate.add_argument("--alpha", type=float, default=0.05, help="Two-sided significance level")
    calibrate.add_argument("--seed", type=int, help="Base seed (defaults to env BANDIT_SEED)")
    calibrate.add_argument("--workers", type=int, help="Worker processes")
    calibrate.add_argument("--out", required=True, help="Calibration record destination")

    analyze = commands.add_parser("analyze", help="Analyze a logged experiment")
    analyze.add_argument("--log", required=True, help="Trial-log CSV")
    analyze.add_argument("--calibration", help="Calibration record for the induced Wald test")
    analyze.add_argument("--out", help="JSON report destination (text to stdout otherwise)")
    analyze.add_argument(
        "--trajectory", help="Write per-step running means and intervals to this CSV"
    )

    report = commands.add_parser("report", help="Render a run's results")
    report.add_argument("--in", dest="in_dir", required=True, help="Run output directory")
    report.add_argument("--format", choices=["csv", "json"], default="csv")
    report.add_argument("--table", choices=["summary", "rewards"], default="summary")
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _dispatch(args: argparse.Namespace) -> int:
    settings = get_settings()

    if args.command == "run":
        config = RunConfig.load(args.config, settings=settings)
        overrides: Dict[str, Any] = {}
        if args.seed is not None:
            overrides["base_seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            config = dataclasses.replace(config, **overrides)
        result = run_command(config)
        print(f"Wrote {len(result.summaries)} cell summaries to {config.output_dir}")
        if not result.ok:
            for failure in result.failures:
                print(f"Error: {failure}", file=sys.stderr)
            return EXIT_CELL_FAILURE
        return EXIT_OK

    if args.command == "calibrate":
        critical = calibrate_command(
            null_p=args.p0,
            n=args.n,
            policy=PolicySpec.parse(args.policy),
            n_sims=args.sims,
            alpha=args.alpha,
            seed=args.seed if args.seed is not None else settings.base_seed,
            out=args.out,
            workers=args.workers,
        )
        print(
            f"Critical values for {critical.policy} at p={args.p0:g}, n={args.n}: "
            f"[{critical.lower:.4f}, {critical.upper:.4f}] -> {args.out}"
        )
        return EXIT_OK

    if args.command == "analyze":
        reports = analyze_command(args.log, args.calibration, args.out, args.trajectory)
        if args.out is None:
            print("\n".join(format_analysis_text(r) for r in reports))
        return EXIT_OK

    print(report_command(args.in_dir, args.format, args.table), end="")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        _configure_logging(args.log_level or get_settings().log_level)
        return _dispatch(args)
    except (BanditInferenceError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO_ERROR
