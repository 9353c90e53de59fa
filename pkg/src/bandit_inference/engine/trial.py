"""Assign -> observe -> update loop for two-arm adaptive experiments."""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.domain import EnvSpec, StepRecord, TrialLog
from ..core.rng import RngStream
from ..policies.allocation import (
    POLICY_UNIFORMS,
    PosteriorState,
    apply_update,
    assignment_probability,
    select_arms,
)
from ..policies.spec import PolicySpec

# Policy uniforms followed by the reward uniform.
UNIFORMS_PER_STEP = POLICY_UNIFORMS + 1

BatchStepCallback = Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]
StepCallback = Callable[[StepRecord], None]


@dataclass(frozen=True)
class ArmCounts:
    """Pulls and successes per arm."""

    n1: int
    n2: int
    s1: int
    s2: int

    def __post_init__(self) -> None:
        if min(self.n1, self.n2, self.s1, self.s2) < 0:
            raise ValueError("counts must be non-negative")
        if self.s1 > self.n1 or self.s2 > self.n2:
            raise ValueError("successes cannot exceed pulls")

    @property
    def horizon(self) -> int:
        return self.n1 + self.n2

    def swapped(self) -> "ArmCounts":
        return ArmCounts(n1=self.n2, n2=self.n1, s1=self.s2, s2=self.s1)


@dataclass
class TrialBatch:
    """Many experiments of one (environment, policy) cell, run in lockstep.

    Attributes:
        env: True environment
        policy: Allocation policy
        sim_indices: Simulation index of each row, shape (k,)
        arms: Chosen arms, shape (k, horizon)
        rewards: Observed rewards, shape (k, horizon)
        pi1: Pre-draw probability of arm 1 at every step, shape (k, horizon)
        final_pi1: Probability of arm 1 for a hypothetical next participant, shape (k,)
        final_state: Policy state after the last update
    """

    env: EnvSpec
    policy: PolicySpec
    sim_indices: np.ndarray
    arms: np.ndarray
    rewards: np.ndarray
    pi1: np.ndarray
    final_pi1: np.ndarray
    final_state: PosteriorState

    def __len__(self) -> int:
        return len(self.sim_indices)

    def counts(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(n1, n2, s1, s2) arrays, one entry per simulation."""
        return (
            self.final_state.pulls[:, 0].copy(),
            self.final_state.pulls[:, 1].copy(),
            self.final_state.successes[:, 0].copy(),
            self.final_state.successes[:, 1].copy(),
        )

    def mean_rewards(self) -> np.ndarray:
        return self.rewards.mean(axis=1)

    def log(self, row: int) -> TrialLog:
        """Materialize one row as a :class:`TrialLog`."""
        steps = [
            StepRecord(t=t + 1, arm=int(arm), reward=int(reward), pi1=float(pi))
            for t, (arm, reward, pi) in enumerate(
                zip(self.arms[row], self.rewards[row], self.pi1[row])
            )
        ]
        return TrialLog(
            env=self.env,
            policy=self.policy,
            steps=steps,
            sim_id=int(self.sim_indices[row]),
            final_pi1=float(self.final_pi1[row]),
        )

    def logs(self) -> List[TrialLog]:
        return [self.log(row) for row in range(len(self))]


def run_trials(
    env: EnvSpec,
    spec: PolicySpec,
    streams: Sequence[RngStream],
    on_step: Optional[BatchStepCallback] = None,
) -> TrialBatch:
    """Run one experiment per stream, all advancing together.

    Each stream supplies ``UNIFORMS_PER_STEP`` uniforms per step: two for the policy,
    then one compared against the chosen arm's true mean for the reward. Every
    operation is elementwise across simulations, so a simulation's result does not
    depend on which other simulations share its batch.

    Args:
        env: True environment
        spec: Allocation policy
        streams: One stream per simulation
        on_step: Optional callback ``(t, arms, rewards, pi1)`` after every step

    Returns:
        The completed batch
    """
    size = len(streams)
    horizon = env.horizon
    uniforms = np.empty((size, horizon, UNIFORMS_PER_STEP), dtype=np.float64)
    for row, stream in enumerate(streams):
        uniforms[row] = stream.random((horizon, UNIFORMS_PER_STEP))

    state = PosteriorState.initial(spec, size)
    arms = np.empty((size, horizon), dtype=np.int8)
    rewards = np.empty((size, horizon), dtype=np.int8)
    pi1 = np.empty((size, horizon), dtype=np.float64)
    means = np.array([env.p1, env.p2])

    for t in range(horizon):
        chosen, probs = select_arms(state, spec, uniforms[:, t, 0], uniforms[:, t, 1])
        observed = (uniforms[:, t, 2] < means[chosen - 1]).astype(np.int8)
        arms[:, t] = chosen
        rewards[:, t] = observed
        pi1[:, t] = probs
        apply_update(state, spec, chosen, observed)
        if on_step is not None:
            on_step(t + 1, chosen, observed, probs)

    return TrialBatch(
        env=env,
        policy=spec,
        sim_indices=np.array([s.sim_index for s in streams], dtype=np.int64),
        arms=arms,
        rewards=rewards,
        pi1=pi1,
        final_pi1=assignment_probability(state, spec),
        final_state=state,
    )


def run_trial(
    env: EnvSpec,
    spec: PolicySpec,
    stream: RngStream,
    on_step: Optional[StepCallback] = None,
) -> TrialLog:
    """Run a single adaptive experiment.

    Args:
        env: True environment
        spec: Allocation policy
        stream: The experiment's random stream
        on_step: Optional callback receiving each :class:`StepRecord` as it happens

    Returns:
        Complete log with ``env.horizon`` steps
    """
    callback: Optional[BatchStepCallback] = None
    if on_step is not None:

        def _forward(t: int, arms: np.ndarray, rewards: np.ndarray, pi1: np.ndarray) -> None:
            on_step(StepRecord(t=t, arm=int(arms[0]), reward=int(rewards[0]), pi1=float(pi1[0])))

        callback = _forward

    return run_trials(env, spec, [stream], on_step=callback).log(0)


def summarize(log: TrialLog) -> ArmCounts:
    """Count pulls and successes per arm."""
    arms, rewards, _ = log.as_arrays()
    on_arm1 = arms == 1
    on_arm2 = arms == 2
    return ArmCounts(
        n1=int(on_arm1.sum()),
        n2=int(on_arm2.sum()),
        s1=int(rewards[on_arm1].sum()),
        s2=int(rewards[on_arm2].sum()),
    )
