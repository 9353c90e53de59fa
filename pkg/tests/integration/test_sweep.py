"""End-to-end sweeps: determinism across workers, in-run calibration, failures."""

import pytest

from bandit_inference import (
    EnvSpec,
    FileResultStore,
    PolicySpec,
    RunConfig,
    Settings,
    SweepService,
    SyncSweepService,
    calibrate_critical_values,
)
from bandit_inference.cli.app import run_command

pytestmark = pytest.mark.integration

CELLS = [
    {"p1": 0.5, "p2": 0.5, "n": 40, "policy": "ts"},
    {"p1": 0.6, "p2": 0.4, "n": 40, "policy": "eg:epsilon=0.1"},
    {"p1": 0.6, "p2": 0.4, "n": 40, "policy": "ur"},
]


def _config(tmp_path, **overrides) -> RunConfig:
    document = {
        "n_sims": 60,
        "base_seed": 11,
        "cells": CELLS,
        "tests": ["wald", "welch", "bayes_factor", "ipw_wald"],
        "output_dir": str(tmp_path),
        **overrides,
    }
    return RunConfig.from_dict(document, settings=Settings())


def test_results_independent_of_workers_and_chunking(tmp_path):
    outputs = {}
    for name, workers, chunk_size in (("serial", 1, 250), ("parallel", 2, 250), ("chunked", 2, 7)):
        config = _config(tmp_path / name, workers=workers, chunk_size=chunk_size)
        result = run_command(config)
        assert result.ok
        outputs[name] = (tmp_path / name / "summary.csv").read_bytes()

    assert outputs["serial"] == outputs["parallel"] == outputs["chunked"]


async def test_async_run_with_in_run_calibration(tmp_path):
    tests = ["wald", {"name": "induced_wald", "null_p": 0.5, "n_sims": 1000}]
    cells = [
        {"p1": 0.5, "p2": 0.5, "n": 40, "policy": "ts"},
        {"p1": 0.6, "p2": 0.4, "n": 40, "policy": "ts"},
    ]
    config = _config(tmp_path, cells=cells, tests=tests)

    result = await SweepService(workers=1, chunk_size=100).run(config)

    assert result.ok
    assert len(result.summaries) == 2
    # Both cells share one calibration, simulated under the first id after the cells.
    (critical,) = result.calibrations.values()
    expected = calibrate_critical_values(
        EnvSpec(0.5, 0.5, 40), PolicySpec.thompson(), 1000, 0.05, base_seed=11, cell_id=2
    )
    assert critical == expected

    params = f"null_p=0.5,lower={critical.lower:.6g},upper={critical.upper:.6g}"
    for summary in result.summaries:
        rate = summary.rejects[("induced_wald", params)]
        assert rate.n_sims == 60
        assert 0.0 <= rate.rate <= 1.0


async def test_parallel_calibration_matches_serial():
    env = EnvSpec(0.5, 0.5, 30)
    spec = PolicySpec.thompson()
    service = SweepService(workers=2, chunk_size=300)
    parallel = await service.calibrate(env, spec, 1000, 0.05, base_seed=4)
    assert parallel == calibrate_critical_values(env, spec, 1000, 0.05, base_seed=4)


def test_sync_calibrate_matches_library():
    env = EnvSpec(0.5, 0.5, 30)
    spec = PolicySpec.uniform_random()
    with SyncSweepService(workers=1) as service:
        critical = service.calibrate(env, spec, 1000, 0.1, base_seed=4)
    assert critical == calibrate_critical_values(env, spec, 1000, 0.1, base_seed=4)
    assert critical.policy == "ur"


def test_failed_calibration_marks_cells_failed(tmp_path):
    # A horizon-2 TS null leaves most Wald statistics undefined.
    tests = ["wald", {"name": "induced_wald", "null_p": 0.5, "n_sims": 1000}]
    cells = [{"p1": 0.5, "p2": 0.5, "n": 2, "policy": "ts"}]
    with SyncSweepService(workers=1) as service:
        result = service.run(_config(tmp_path, cells=cells, tests=tests))

    assert not result.ok
    assert result.summaries == []
    (failure,) = result.failures
    assert failure.cell_label.startswith("ts:alpha=1,beta=1")
    assert "defined" in str(failure)


def test_saved_logs_reproduce_summary(tmp_path):
    config = _config(tmp_path, n_sims=3, save_logs=True)
    result = run_command(config)

    store = FileResultStore(str(tmp_path))
    for cell_id, cell in enumerate(config.cells):
        path = tmp_path / "logs" / f"cell_{cell_id}.csv"
        logs = store.load_trial_log(str(path), cell.env, cell.policy)
        assert len(logs) == 3
        assert [log.sim_id for log in logs] == [0, 1, 2]
        assert all(log.horizon == 40 for log in logs)
        run = result.runs[cell_id]
        assert [sum(s.arm == 1 for s in log.steps) for log in logs] == list(run.n1)
