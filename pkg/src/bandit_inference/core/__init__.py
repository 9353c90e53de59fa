"""Domain types, random streams and the Bernoulli environment."""

from .domain import EnvSpec, StepRecord, TrialLog
from .rng import RngStream, bernoulli_draw, check_probability, derive_stream

__all__ = [
    "EnvSpec",
    "StepRecord",
    "TrialLog",
    "RngStream",
    "derive_stream",
    "bernoulli_draw",
    "check_probability",
]
