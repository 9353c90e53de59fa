"""Tests for environment settings and run configuration."""

import json

import pytest

from bandit_inference import ConfigError, EnvSpec, PolicySpec, RunConfig, Settings, get_settings

BASE = {
    "n_sims": 100,
    "cells": [{"p1": 0.5, "p2": 0.5, "n": 50, "policy": "ts"}],
}


def test_settings_defaults():
    settings = Settings.from_env()
    assert settings.base_seed == 20210501
    assert settings.workers == 1
    assert settings.chunk_size == 250
    assert settings.log_level == "INFO"


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("BANDIT_SEED", "42")
    monkeypatch.setenv("BANDIT_WORKERS", "4")
    monkeypatch.setenv("BANDIT_OUTPUT_DIR", "/tmp/out")
    monkeypatch.setenv("BANDIT_LOG_LEVEL", "debug")
    settings = get_settings()
    assert (settings.base_seed, settings.workers, settings.output_dir) == (42, 4, "/tmp/out")
    assert settings.log_level == "DEBUG"
    assert get_settings() is settings


def test_settings_report_every_invalid_variable(monkeypatch):
    monkeypatch.setenv("BANDIT_WORKERS", "0")
    monkeypatch.setenv("BANDIT_SEED", "abc")
    with pytest.raises(ValueError) as exc_info:
        Settings.from_env()
    message = str(exc_info.value)
    assert "BANDIT_WORKERS" in message and "BANDIT_SEED" in message


def test_minimal_config_uses_settings():
    config = RunConfig.from_dict(BASE, settings=Settings(base_seed=9, workers=3))
    assert config.base_seed == 9
    assert config.workers == 3
    assert config.cells[0].env == EnvSpec(0.5, 0.5, 50)
    assert config.cells[0].policy == PolicySpec.thompson()
    assert [t.name for t in config.tests] == ["wald"]


def test_full_config(write_config, tmp_path):
    calibration = tmp_path / "cal.json"
    calibration.write_text("{}")
    document = {
        **BASE,
        "base_seed": 5,
        "save_logs": True,
        "tests": [
            "welch",
            {
                "name": "bayes_factor",
                "cutoffs": [3, 1],
                "prior_alpha": 0.5,
                "prior_beta": 0.5,
                "normalized": False,
            },
            {"name": "induced_wald", "calibration": "cal.json"},
            {"name": "induced_wald", "null_p": 0.25, "n_sims": 2000, "alpha": 0.1},
        ],
    }
    config = RunConfig.load(str(write_config(document)))
    welch, bf, from_file, in_run = config.tests
    assert welch.name == "welch"
    assert bf.cutoffs == (3.0, 1.0) and not bf.normalized and bf.prior_alpha == 0.5
    assert from_file.calibration == str(calibration)
    assert (in_run.null_p, in_run.calibration_sims, in_run.alpha) == (0.25, 2000, 0.1)
    assert config.save_logs
    assert config.source_path is not None


def test_to_dict_echo():
    config = RunConfig.from_dict({**BASE, "tests": [{"name": "bayes_factor"}]}, settings=Settings())
    echo = config.to_dict()
    assert echo["cells"] == [{"p1": 0.5, "p2": 0.5, "n": 50, "policy": "ts:alpha=1,beta=1"}]
    assert echo["tests"][0]["cutoffs"] == [3.0, 1.0, 0.4]
    assert echo["tests"][0]["normalized"] is True
    assert json.loads(json.dumps(echo)) == echo


@pytest.mark.parametrize(
    "document, fragment",
    [
        ({"cells": BASE["cells"]}, "n_sims"),
        ({**BASE, "n_sims": 0}, "n_sims"),
        ({**BASE, "cells": []}, "cells"),
        ({**BASE, "cells": [{"p1": 1.5, "p2": 0.5, "n": 10}]}, "cells[0]"),
        ({**BASE, "cells": [{"p1": 0.5, "n": 10}]}, "cells[0].p2"),
        ({**BASE, "cells": [{**BASE["cells"][0], "policy": "greedy"}]}, "cells[0].policy"),
        ({**BASE, "tests": [{"name": "anova"}]}, "tests[0].name"),
        ({**BASE, "tests": [{"name": "bayes_factor", "cutoffs": [0]}]}, "tests[0].cutoffs"),
        ({**BASE, "tests": [{"name": "induced_wald"}]}, "tests[0]"),
        (
            {**BASE, "tests": [{"name": "induced_wald", "calibration": "missing.json"}]},
            "tests[0].calibration",
        ),
        (
            {**BASE, "tests": [{"name": "induced_wald", "null_p": 0.5, "alpha": 1.0}]},
            "tests[0].alpha",
        ),
        ({**BASE, "colour": "blue"}, "colour"),
    ],
)
def test_invalid_configs(document, fragment):
    with pytest.raises(ConfigError) as exc_info:
        RunConfig.from_dict(document, settings=Settings())
    assert fragment in str(exc_info.value)


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.load(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        RunConfig.load(str(tmp_path / "absent.json"))
