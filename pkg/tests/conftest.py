"""Shared fixtures."""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List

import pytest

import bandit_inference.config as config_module
from bandit_inference import EnvSpec, PolicySpec, StepRecord, TrialLog

TEST_SEED = 20210501
SETTINGS_VARIABLES = (
    "BANDIT_SEED",
    "BANDIT_WORKERS",
    "BANDIT_CHUNK_SIZE",
    "BANDIT_OUTPUT_DIR",
    "BANDIT_LOG_LEVEL",
)


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Isolate every test from BANDIT_* variables and the cached settings."""
    for name in SETTINGS_VARIABLES:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr(config_module, "_settings", None)
    yield
    config_module._settings = None


@pytest.fixture
def seed() -> int:
    return TEST_SEED


@pytest.fixture
def null_env() -> EnvSpec:
    return EnvSpec(p1=0.5, p2=0.5, horizon=785)


@pytest.fixture
def effect_env() -> EnvSpec:
    return EnvSpec(p1=0.55, p2=0.45, horizon=785)


@pytest.fixture
def small_env() -> EnvSpec:
    return EnvSpec(p1=0.6, p2=0.4, horizon=50)


@pytest.fixture
def ts() -> PolicySpec:
    return PolicySpec.thompson()


@pytest.fixture
def ur() -> PolicySpec:
    return PolicySpec.uniform_random()


@pytest.fixture
def eg() -> PolicySpec:
    return PolicySpec.epsilon_greedy(0.1)


@pytest.fixture
def make_log() -> Callable[..., TrialLog]:
    """Build a log from (arm, reward, pi1) triples."""

    def _make(steps: List[tuple], sim_id: int = 0, env: EnvSpec = None) -> TrialLog:
        records = [StepRecord(t=i + 1, arm=a, reward=r, pi1=p) for i, (a, r, p) in enumerate(steps)]
        return TrialLog(env=env, policy=None, steps=records, sim_id=sim_id)

    return _make


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any]], Path]:
    """Write a run configuration document and return its path."""

    def _write(document: Dict[str, Any], name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return path

    return _write
