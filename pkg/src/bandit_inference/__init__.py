"""bandit-inference: simulate two-arm adaptive experiments and test hypotheses on the data.

Public API:
    - EnvSpec, StepRecord, TrialLog, RngStream: Domain types and seeded streams
    - PolicySpec, PosteriorState: Uniform random, Thompson sampling and epsilon-greedy allocation
    - run_trial, run_trials, summarize, ArmCounts: Trial engine
    - mle_estimate, ipw_estimate, wald_statistic: Estimators
    - wald_test, welch_test, bayes_factor, bf_test: Hypothesis tests
    - calibrate_critical_values, CriticalValues: Simulation-calibrated Wald critical values
    - CellSummary and the metrics helpers: Rejection rates, diagnostics, histograms
    - SweepService, SyncSweepService: Parallel seeded sweeps
    - RunConfig, Settings: Configuration
    - ResultStore, FileResultStore: Result persistence
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("bandit-inference")
except PackageNotFoundError:
    # Package not installed, use development version
    __version__ = "0.0.0.dev"

from .config import CellConfig, RunConfig, Settings, TestConfig, get_settings
from .core import EnvSpec, RngStream, StepRecord, TrialLog, bernoulli_draw, derive_stream
from .engine import ArmCounts, TrialBatch, run_trial, run_trials, summarize
from .errors import (
    BanditInferenceError,
    CalibrationError,
    CellFailure,
    ConfigError,
    DataIntegrityError,
    DomainError,
    LogParseError,
)
from .inference import (
    CriticalValues,
    Estimate,
    EstimatorMethod,
    TestOutcome,
    bayes_factor,
    bf_test,
    calibrate_critical_values,
    ipw_estimate,
    mle_estimate,
    wald_statistic,
    wald_test,
    welch_test,
)
from .metrics import (
    CellSummary,
    assignment_prob_histogram,
    assignment_tail_proportion,
    bias_table,
    mean_reward_summary,
    reject_rate_summary,
    required_sample_size,
    trajectory_frame,
    ur_power,
)
from .orchestration import SweepResult, SweepService, SyncSweepService
from .policies import (
    BetaParams,
    PolicyKind,
    PolicySpec,
    PosteriorState,
    posterior_prob_optimal,
    select_arm,
    ts_update,
)
from .storage import FileResultStore, ResultStore

__all__ = [
    # Version
    "__version__",
    # Domain
    "EnvSpec",
    "RngStream",
    "StepRecord",
    "TrialLog",
    "bernoulli_draw",
    "derive_stream",
    # Policies
    "BetaParams",
    "PolicyKind",
    "PolicySpec",
    "PosteriorState",
    "posterior_prob_optimal",
    "select_arm",
    "ts_update",
    # Engine
    "ArmCounts",
    "TrialBatch",
    "run_trial",
    "run_trials",
    "summarize",
    # Inference
    "CriticalValues",
    "Estimate",
    "EstimatorMethod",
    "TestOutcome",
    "bayes_factor",
    "bf_test",
    "calibrate_critical_values",
    "ipw_estimate",
    "mle_estimate",
    "wald_statistic",
    "wald_test",
    "welch_test",
    # Metrics
    "CellSummary",
    "assignment_prob_histogram",
    "assignment_tail_proportion",
    "bias_table",
    "mean_reward_summary",
    "reject_rate_summary",
    "required_sample_size",
    "trajectory_frame",
    "ur_power",
    # Orchestration
    "SweepResult",
    "SweepService",
    "SyncSweepService",
    # Storage
    "ResultStore",
    "FileResultStore",
    # Configuration
    "CellConfig",
    "RunConfig",
    "Settings",
    "TestConfig",
    "get_settings",
    # Errors
    "BanditInferenceError",
    "CalibrationError",
    "CellFailure",
    "ConfigError",
    "DataIntegrityError",
    "DomainError",
    "LogParseError",
]
