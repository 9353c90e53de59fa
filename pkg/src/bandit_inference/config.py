"""Configuration management for bandit-inference."""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

from .core.domain import EnvSpec
from .errors import ConfigError, DomainError
from .inference.hypothesis import DEFAULT_BF_CUTOFFS
from .policies.spec import PolicySpec

# Load environment variables from .env file
load_dotenv()

DEFAULT_SEED = 20210501
DEFAULT_CHUNK_SIZE = 250
TEST_NAMES = ("wald", "welch", "bayes_factor", "ipw_wald", "induced_wald")


@dataclass
class Settings:
    """Process-wide defaults from environment variables."""

    base_seed: int = DEFAULT_SEED
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE
    output_dir: str = "./results"
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "Settings":
        """Load settings from environment variables with validation.

        Reads BANDIT_SEED, BANDIT_WORKERS, BANDIT_CHUNK_SIZE, BANDIT_OUTPUT_DIR and
        BANDIT_LOG_LEVEL; unset variables keep their defaults.

        Raises:
            ValueError: Listing every variable with an invalid value
        """
        invalid = []
        values: Dict[str, Any] = {}

        integer_vars = {
            "BANDIT_SEED": ("base_seed", 0, 2**64 - 1),
            "BANDIT_WORKERS": ("workers", 1, None),
            "BANDIT_CHUNK_SIZE": ("chunk_size", 1, None),
        }
        for env_var, (field_name, low, high) in integer_vars.items():
            raw = os.getenv(env_var)
            if raw is None or raw == "":
                continue
            try:
                value = int(raw)
            except ValueError:
                invalid.append(f"{env_var}={raw!r}")
                continue
            if value < low or (high is not None and value > high):
                invalid.append(f"{env_var}={raw!r}")
                continue
            values[field_name] = value

        if os.getenv("BANDIT_OUTPUT_DIR"):
            values["output_dir"] = os.environ["BANDIT_OUTPUT_DIR"]

        log_level = os.getenv("BANDIT_LOG_LEVEL", "INFO").upper()
        if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            invalid.append(f"BANDIT_LOG_LEVEL={log_level!r}")
        else:
            values["log_level"] = log_level

        if invalid:
            raise ValueError(
                f"Invalid environment variables: {', '.join(invalid)}\n"
                f"Please check your .env file or environment configuration."
            )

        return cls(**values)


# Global settings instance (lazy loaded)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


@dataclass(frozen=True)
class CellConfig:
    """One (environment, policy) pair of a sweep."""

    env: EnvSpec
    policy: PolicySpec

    @property
    def label(self) -> str:
        return f"{self.policy.label}@p1={self.env.p1:g},p2={self.env.p2:g},n={self.env.horizon}"


@dataclass(frozen=True)
class TestConfig:
    """A hypothesis test applied to every simulation of every cell.

    For ``induced_wald`` either ``calibration`` (path to a calibration record) or
    ``null_p`` (calibrate in-run under each cell's own policy and horizon) is set.
    """

    __test__ = False  # not a pytest class

    name: str
    cutoffs: Tuple[float, ...] = DEFAULT_BF_CUTOFFS
    prior_alpha: float = 1.0
    prior_beta: float = 1.0
    normalized: bool = True
    calibration: Optional[str] = None
    null_p: Optional[float] = None
    calibration_sims: int = 5000
    alpha: float = 0.05


@dataclass
class RunConfig:
    """A complete sweep: cells, simulations per cell and tests."""

    cells: List[CellConfig]
    tests: List[TestConfig]
    n_sims: int
    base_seed: int = DEFAULT_SEED
    output_dir: str = "./results"
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE
    save_logs: bool = False
    source_path: Optional[str] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n_sims < 1:
            raise ConfigError("n_sims must be at least 1")
        if not self.cells:
            raise ConfigError("cells must list at least one cell")
        if self.workers < 1 or self.chunk_size < 1:
            raise ConfigError("workers and chunk_size must be at least 1")
        if not 0 <= self.base_seed <= 2**64 - 1:
            raise ConfigError("base_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        settings: Optional[Settings] = None,
        base_dir: Optional[Path] = None,
    ) -> "RunConfig":
        """Build a run configuration from a parsed JSON document.

        Args:
            data: Parsed JSON object
            settings: Defaults for keys the document leaves out
            base_dir: Directory that relative calibration paths are resolved against

        Raises:
            ConfigError: Naming the first offending key
        """
        settings = settings or get_settings()
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")

        unknown = set(data) - {
            "cells", "tests", "n_sims", "base_seed", "output_dir", "workers",
            "chunk_size", "save_logs",
        }
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

        raw_cells = _require_list(data, "cells")
        cells = [_parse_cell(raw, f"cells[{i}]") for i, raw in enumerate(raw_cells)]
        tests = [
            _parse_test(raw, f"tests[{i}]", base_dir)
            for i, raw in enumerate(data.get("tests", [{"name": "wald"}]))
        ]
        try:
            return cls(
                cells=cells,
                tests=tests,
                n_sims=int(_require(data, "n_sims")),
                base_seed=int(data.get("base_seed", settings.base_seed)),
                output_dir=str(data.get("output_dir", settings.output_dir)),
                workers=int(data.get("workers", settings.workers)),
                chunk_size=int(data.get("chunk_size", settings.chunk_size)),
                save_logs=bool(data.get("save_logs", False)),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"invalid config value: {e}") from e

    @classmethod
    def load(cls, path: str, settings: Optional[Settings] = None) -> "RunConfig":
        """Read and validate a JSON config file.

        Raises:
            ConfigError: If the file is not valid JSON or fails validation
            OSError: If the file cannot be read
        """
        config_path = Path(path)
        try:
            data = json.loads(config_path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e
        config = cls.from_dict(data, settings=settings, base_dir=config_path.parent)
        config.source_path = str(config_path)
        return config

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready echo of the resolved configuration."""
        tests = []
        for test in self.tests:
            item: Dict[str, Any] = {"name": test.name}
            if test.name == "bayes_factor":
                item.update(
                    cutoffs=list(test.cutoffs),
                    prior_alpha=test.prior_alpha,
                    prior_beta=test.prior_beta,
                    normalized=test.normalized,
                )
            elif test.name == "induced_wald":
                if test.calibration is not None:
                    item["calibration"] = test.calibration
                else:
                    item.update(null_p=test.null_p, n_sims=test.calibration_sims, alpha=test.alpha)
            tests.append(item)
        return {
            "n_sims": self.n_sims,
            "base_seed": self.base_seed,
            "workers": self.workers,
            "chunk_size": self.chunk_size,
            "save_logs": self.save_logs,
            "output_dir": self.output_dir,
            "cells": [
                {"p1": c.env.p1, "p2": c.env.p2, "n": c.env.horizon, "policy": c.policy.label}
                for c in self.cells
            ],
            "tests": tests,
        }


def _require(data: Dict[str, Any], key: str, path: str = "") -> Any:
    if key not in data:
        raise ConfigError(f"missing required key '{path}{key}'")
    return data[key]


def _require_list(data: Dict[str, Any], key: str) -> List[Any]:
    value = _require(data, key)
    if not isinstance(value, list):
        raise ConfigError(f"'{key}' must be a list")
    return value


def _parse_cell(raw: Any, path: str) -> CellConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must be an object")
    try:
        env = EnvSpec(
            p1=float(_require(raw, "p1", f"{path}.")),
            p2=float(_require(raw, "p2", f"{path}.")),
            horizon=int(_require(raw, "n", f"{path}.")),
        )
    except (DomainError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{path}: {e}") from e
    policy = raw.get("policy", "ts")
    try:
        spec = PolicySpec.parse(str(policy))
    except ConfigError as e:
        raise ConfigError(f"{path}.policy: {e}") from e
    return CellConfig(env=env, policy=spec)


def _parse_test(raw: Any, path: str, base_dir: Optional[Path]) -> TestConfig:
    if isinstance(raw, str):
        raw = {"name": raw}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must be an object or a test name")
    name = str(_require(raw, "name", f"{path}."))
    if name not in TEST_NAMES:
        expected = ", ".join(TEST_NAMES)
        raise ConfigError(f"{path}.name: unknown test '{name}' (expected one of {expected})")

    options: Dict[str, Any] = {}
    try:
        if name == "bayes_factor":
            cutoffs = tuple(float(c) for c in raw.get("cutoffs", DEFAULT_BF_CUTOFFS))
            if not cutoffs or min(cutoffs) <= 0:
                raise ConfigError(f"{path}.cutoffs must be positive numbers")
            options.update(
                cutoffs=cutoffs,
                prior_alpha=float(raw.get("prior_alpha", 1.0)),
                prior_beta=float(raw.get("prior_beta", 1.0)),
                normalized=bool(raw.get("normalized", True)),
            )
            if options["prior_alpha"] <= 0 or options["prior_beta"] <= 0:
                raise ConfigError(f"{path}: prior parameters must be positive")
        elif name == "induced_wald":
            calibration = raw.get("calibration")
            null_p = raw.get("null_p")
            if (calibration is None) == (null_p is None):
                raise ConfigError(f"{path}: set exactly one of 'calibration' or 'null_p'")
            if calibration is not None:
                calibration_path = Path(str(calibration))
                if not calibration_path.is_absolute() and base_dir is not None:
                    calibration_path = base_dir / calibration_path
                if not calibration_path.exists():
                    raise ConfigError(f"{path}.calibration: file {calibration_path} does not exist")
                options["calibration"] = str(calibration_path)
            else:
                null_p = float(null_p)
                if not 0.0 <= null_p <= 1.0:
                    raise ConfigError(f"{path}.null_p must be in [0, 1]")
                alpha = float(raw.get("alpha", 0.05))
                if not 0.0 < alpha < 1.0:
                    raise ConfigError(f"{path}.alpha must be strictly between 0 and 1")
                options.update(
                    null_p=null_p,
                    calibration_sims=int(raw.get("n_sims", 5000)),
                    alpha=alpha,
                )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{path}: {e}") from e
    return TestConfig(name=name, **options)
