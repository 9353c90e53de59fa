"""Sweep orchestration: chunked simulation, evaluation and parallel execution."""

from .evaluation import (
    CellRun,
    ChunkResult,
    ChunkTask,
    evaluate_cell,
    plan_chunks,
    simulate_chunk,
    summary_params,
)
from .sweep import SweepResult, SweepService
from .sync_wrapper import SyncSweepService

__all__ = [
    "CellRun",
    "ChunkResult",
    "ChunkTask",
    "evaluate_cell",
    "plan_chunks",
    "simulate_chunk",
    "summary_params",
    "SweepResult",
    "SweepService",
    "SyncSweepService",
]
