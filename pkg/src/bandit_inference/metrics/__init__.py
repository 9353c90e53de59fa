"""Cell-level summaries: rejection rates, diagnostics, histograms and rewards."""

from .design import required_sample_size, ur_power
from .summary import (
    HISTOGRAM_EDGES,
    ArmDiagnostics,
    AssignmentHistogram,
    CellSummary,
    EstimatorDiagnostics,
    RejectRate,
    assignment_prob_histogram,
    assignment_tail_proportion,
    bias_table,
    diagnostics_from_arrays,
    mean_reward_from_array,
    mean_reward_summary,
    reject_rate_from_masks,
    reject_rate_summary,
)
from .trajectory import trajectory_frame

__all__ = [
    "HISTOGRAM_EDGES",
    "ArmDiagnostics",
    "AssignmentHistogram",
    "CellSummary",
    "EstimatorDiagnostics",
    "RejectRate",
    "assignment_prob_histogram",
    "assignment_tail_proportion",
    "bias_table",
    "diagnostics_from_arrays",
    "mean_reward_from_array",
    "mean_reward_summary",
    "reject_rate_from_masks",
    "reject_rate_summary",
    "required_sample_size",
    "ur_power",
    "trajectory_frame",
]
