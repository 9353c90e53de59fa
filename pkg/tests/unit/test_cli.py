"""Tests for the command-line interface."""

import json

import pandas as pd
import pytest

from bandit_inference.cli.app import EXIT_CELL_FAILURE, EXIT_ERROR, EXIT_IO_ERROR, EXIT_OK, main
from bandit_inference.storage import read_calibration

SMALL_RUN = {
    "n_sims": 20,
    "cells": [
        {"p1": 0.6, "p2": 0.4, "n": 30, "policy": "ts"},
        {"p1": 0.6, "p2": 0.4, "n": 30, "policy": "ur"},
    ],
    "tests": ["wald", "welch", "bayes_factor", "ipw_wald"],
    "save_logs": True,
}
CALIBRATE = ["calibrate", "--p0", "0.5", "--n", "30"]


def _write_log(path, rows):
    lines = ["sim_id,t,arm,reward,pi1"] + [",".join(map(str, row)) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def test_run_writes_every_table(write_config, tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--config", str(write_config(SMALL_RUN)), "--out", str(out)])

    assert code == EXIT_OK
    tables = ("summary.csv", "diagnostics.csv", "rewards.csv", "assignment.csv")
    for name in (*tables, "run_config.json"):
        assert (out / name).exists()
    summary = pd.read_csv(out / "summary.csv")
    assert set(summary["policy"]) == {"ts:alpha=1,beta=1", "ur"}
    assert len(summary) == 2 * 6
    logs = pd.read_csv(out / "logs" / "cell_0.csv")
    assert len(logs) == 20 * 30
    assert json.loads((out / "run_config.json").read_text())["n_sims"] == 20


def test_run_seed_override_changes_results(write_config, tmp_path):
    config = str(write_config(SMALL_RUN))
    main(["run", "--config", config, "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["run", "--config", config, "--out", str(tmp_path / "b"), "--seed", "1"])
    main(["run", "--config", config, "--out", str(tmp_path / "c"), "--seed", "2"])
    a, b, c = (pd.read_csv(tmp_path / d / "logs" / "cell_0.csv") for d in "abc")
    assert a.equals(b)
    assert not a.equals(c)


def test_run_with_invalid_config(write_config, capsys):
    code = main(["run", "--config", str(write_config({"n_sims": 10, "cells": []}))])
    assert code == EXIT_ERROR
    assert "Error" in capsys.readouterr().err


def test_run_with_missing_config(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == EXIT_IO_ERROR


def test_run_reports_failed_cells(write_config, tmp_path, capsys):
    calibration = tmp_path / "broken.json"
    calibration.write_text(json.dumps({"null_p": 0.5}))
    document = {**SMALL_RUN, "tests": [{"name": "induced_wald", "calibration": str(calibration)}]}
    code = main(["run", "--config", str(write_config(document)), "--out", str(tmp_path / "out")])
    assert code == EXIT_CELL_FAILURE
    assert "missing keys" in capsys.readouterr().err


def test_calibrate_and_analyze(tmp_path, capsys):
    record = tmp_path / "cal.json"
    code = main(CALIBRATE + ["--sims", "1000", "--seed", "3", "--out", str(record)])
    assert code == EXIT_OK
    critical = read_calibration(record)
    assert critical.calibration_n == 30
    assert critical.calibration_sims == 1000
    assert critical.lower < 0 < critical.upper
    assert "Critical values" in capsys.readouterr().out

    log = tmp_path / "log.csv"
    _write_log(log, [(0, 1, 1, 1, 0.5), (0, 2, 2, 0, 0.5), (0, 3, 1, 0, 0.5), (0, 4, 2, 1, 0.5)])
    report = tmp_path / "report.json"
    code = main(["analyze", "--log", str(log), "--calibration", str(record), "--out", str(report)])
    assert code == EXIT_OK
    (result,) = json.loads(report.read_text())
    assert [t["test"] for t in result["tests"]][-1] == "induced_wald"


def test_calibrate_rejects_out_of_range_alpha(tmp_path):
    assert main(CALIBRATE + ["--alpha", "1.0", "--out", str(tmp_path / "c.json")]) == EXIT_ERROR


def test_calibrate_rejects_too_few_simulations(tmp_path):
    assert main(CALIBRATE + ["--sims", "999", "--out", str(tmp_path / "c.json")]) == EXIT_ERROR


def test_analyze_uniform_log_ipw_equals_mle(tmp_path):
    log = tmp_path / "log.csv"
    arms_rewards = [(1, 1), (2, 0), (1, 0), (2, 1), (1, 1)]
    _write_log(log, [(0, t, arm, reward, 0.5) for t, (arm, reward) in enumerate(arms_rewards, 1)])
    out = tmp_path / "report.json"
    trajectory = tmp_path / "trajectory.csv"

    args = ["analyze", "--log", str(log), "--out", str(out), "--trajectory", str(trajectory)]
    assert main(args) == EXIT_OK

    (report,) = json.loads(out.read_text())
    assert report["counts"] == {"n1": 3, "n2": 2, "s1": 2, "s2": 1}
    assert report["estimates"]["ipw"]["p1"] == pytest.approx(report["estimates"]["mle"]["p1"])
    assert report["estimates"]["ipw"]["p2"] == pytest.approx(report["estimates"]["mle"]["p2"])
    assert len(pd.read_csv(trajectory)) == 5


def test_analyze_single_arm_log_has_undefined_wald(tmp_path, capsys):
    log = tmp_path / "log.csv"
    _write_log(log, [(0, 1, 1, 1, 0.9), (0, 2, 1, 0, 0.9)])

    assert main(["analyze", "--log", str(log)]) == EXIT_OK

    text = capsys.readouterr().out
    wald_line = next(line for line in text.splitlines() if line.strip().startswith("wald"))
    assert "NA" in wald_line and "undefined" in wald_line


def test_analyze_rejects_zero_probability_for_pulled_arm(tmp_path):
    log = tmp_path / "log.csv"
    _write_log(log, [(0, 1, 1, 1, 0.0), (0, 2, 2, 0, 0.0)])
    assert main(["analyze", "--log", str(log)]) == EXIT_ERROR


def test_analyze_reports_parse_errors(tmp_path, capsys):
    log = tmp_path / "log.csv"
    _write_log(log, [(0, 1, 1, 1, 0.5), (0, 2, 3, 0, 0.5)])
    assert main(["analyze", "--log", str(log)]) == EXIT_ERROR
    assert "arm" in capsys.readouterr().err


def test_report_formats(write_config, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--config", str(write_config(SMALL_RUN)), "--out", str(out)])
    capsys.readouterr()

    assert main(["report", "--in", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    header = text.splitlines()[0]
    assert header == 'test,params,"ts:alpha=1,beta=1 p1=0.6 p2=0.4 n=30",ur p1=0.6 p2=0.4 n=30'
    assert " % (" in text

    assert main(["report", "--in", str(out), "--format", "json", "--table", "rewards"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert [row["policy"] for row in rows] == ["ts:alpha=1,beta=1", "ur"]


def test_report_on_missing_directory(tmp_path):
    assert main(["report", "--in", str(tmp_path / "nowhere")]) == EXIT_IO_ERROR


def test_unknown_command_is_a_usage_error():
    assert main(["frobnicate"]) == 2
