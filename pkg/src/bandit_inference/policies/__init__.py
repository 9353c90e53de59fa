"""Allocation policies: Uniform Random, Thompson Sampling and Epsilon-Greedy."""

from .allocation import (
    PosteriorState,
    apply_update,
    assignment_probability,
    select_arm,
    select_arms,
    ts_update,
)
from .posterior import BetaParams, posterior_prob_optimal, prob_after_unit_increment
from .spec import PolicyKind, PolicySpec

__all__ = [
    "PolicyKind",
    "PolicySpec",
    "PosteriorState",
    "BetaParams",
    "posterior_prob_optimal",
    "prob_after_unit_increment",
    "assignment_probability",
    "select_arm",
    "select_arms",
    "apply_update",
    "ts_update",
]
