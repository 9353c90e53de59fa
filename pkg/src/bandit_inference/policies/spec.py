"""Allocation policy configuration."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict

from ..errors import ConfigError, DomainError


class PolicyKind(str, Enum):
    """Supported allocation policies."""

    UNIFORM_RANDOM = "ur"
    THOMPSON_SAMPLING = "ts"
    EPSILON_GREEDY = "eg"


_KIND_ALIASES = {
    "ur": PolicyKind.UNIFORM_RANDOM,
    "uniform": PolicyKind.UNIFORM_RANDOM,
    "ts": PolicyKind.THOMPSON_SAMPLING,
    "thompson": PolicyKind.THOMPSON_SAMPLING,
    "eg": PolicyKind.EPSILON_GREEDY,
    "epsilon_greedy": PolicyKind.EPSILON_GREEDY,
}

_OPTION_FIELDS = {
    PolicyKind.UNIFORM_RANDOM: {},
    PolicyKind.THOMPSON_SAMPLING: {
        "alpha": "ts_prior_alpha",
        "beta": "ts_prior_beta",
        "w": "ts_update_weight",
    },
    PolicyKind.EPSILON_GREEDY: {"epsilon": "eg_epsilon"},
}


def _format_number(value: float) -> str:
    return f"{value:.15g}"


@dataclass(frozen=True)
class PolicySpec:
    """Allocation policy and its parameters.

    The TS fields only matter for Thompson Sampling and ``eg_epsilon`` only for
    Epsilon-Greedy; they keep their defaults otherwise.
    """

    kind: PolicyKind
    ts_prior_alpha: float = 1.0
    ts_prior_beta: float = 1.0
    ts_update_weight: float = 1.0
    eg_epsilon: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        for name in ("ts_prior_alpha", "ts_prior_beta", "ts_update_weight"):
            value = float(getattr(self, name))
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be a positive finite number, got {value}")
            object.__setattr__(self, name, value)
        epsilon = float(self.eg_epsilon)
        if not 0.0 <= epsilon <= 1.0:
            raise DomainError(f"eg_epsilon must be in [0, 1], got {epsilon}")
        object.__setattr__(self, "eg_epsilon", epsilon)

    @classmethod
    def uniform_random(cls) -> "PolicySpec":
        return cls(PolicyKind.UNIFORM_RANDOM)

    @classmethod
    def thompson(cls, alpha: float = 1.0, beta: float = 1.0, weight: float = 1.0) -> "PolicySpec":
        return cls(
            PolicyKind.THOMPSON_SAMPLING,
            ts_prior_alpha=alpha,
            ts_prior_beta=beta,
            ts_update_weight=weight,
        )

    @classmethod
    def epsilon_greedy(cls, epsilon: float = 0.1) -> "PolicySpec":
        return cls(PolicyKind.EPSILON_GREEDY, eg_epsilon=epsilon)

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        """Parse a policy string such as ``ts:alpha=0.5,beta=0.5`` or ``eg:epsilon=0.2``.

        Args:
            text: Policy description; the kind may be followed by ``:key=value`` options

        Returns:
            Parsed policy specification

        Raises:
            ConfigError: If the kind or an option is unknown or malformed
        """
        head, _, options = text.strip().partition(":")
        kind = _KIND_ALIASES.get(head.strip().lower())
        if kind is None:
            raise ConfigError(f"unknown policy '{head}' (expected one of ur, ts, eg)")

        allowed = _OPTION_FIELDS[kind]
        values: Dict[str, float] = {}
        for item in filter(None, (part.strip() for part in options.split(","))):
            key, sep, raw = item.partition("=")
            key = key.strip().lower()
            if not sep or key not in allowed:
                raise ConfigError(
                    f"invalid option '{item}' for policy '{kind.value}'"
                    f" (allowed: {', '.join(allowed) or 'none'})"
                )
            try:
                values[allowed[key]] = float(raw)
            except ValueError as e:
                raise ConfigError(f"option '{key}' needs a number, got '{raw}'") from e

        try:
            return cls(kind, **values)
        except DomainError as e:
            raise ConfigError(str(e)) from e

    @property
    def label(self) -> str:
        """Canonical string form; ``PolicySpec.parse(spec.label) == spec``."""
        if self.kind is PolicyKind.UNIFORM_RANDOM:
            return "ur"
        if self.kind is PolicyKind.EPSILON_GREEDY:
            return f"eg:epsilon={_format_number(self.eg_epsilon)}"
        label = (
            f"ts:alpha={_format_number(self.ts_prior_alpha)},"
            f"beta={_format_number(self.ts_prior_beta)}"
        )
        if self.ts_update_weight != 1.0:
            label += f",w={_format_number(self.ts_update_weight)}"
        return label

    def __str__(self) -> str:
        return self.label
