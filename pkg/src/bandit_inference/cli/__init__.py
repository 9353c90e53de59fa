"""Command-line interface."""

from .app import (
    analyze_command,
    analyze_log,
    build_parser,
    calibrate_command,
    main,
    report_command,
    run_command,
)

__all__ = [
    "analyze_command",
    "analyze_log",
    "build_parser",
    "calibrate_command",
    "main",
    "report_command",
    "run_command",
]
