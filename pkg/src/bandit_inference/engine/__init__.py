"""Trial engine: runs complete adaptive experiments."""

from .trial import UNIFORMS_PER_STEP, ArmCounts, TrialBatch, run_trial, run_trials, summarize

__all__ = [
    "ArmCounts",
    "TrialBatch",
    "UNIFORMS_PER_STEP",
    "run_trial",
    "run_trials",
    "summarize",
]
