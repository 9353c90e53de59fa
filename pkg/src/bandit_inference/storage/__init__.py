"""Persistence of results, trial logs and calibration records."""

from .base import ResultStore
from .files import (
    FileResultStore,
    read_calibration,
    read_trial_logs,
    write_calibration,
    write_trial_logs,
)

__all__ = [
    "ResultStore",
    "FileResultStore",
    "read_calibration",
    "read_trial_logs",
    "write_calibration",
    "write_trial_logs",
]
