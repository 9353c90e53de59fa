"""Posterior state and arm selection for the three allocation policies.

All functions work on a batch of ``k`` independent simulations stored as arrays, so
the trial engine can advance many experiments in lockstep. A single experiment is
simply a batch of one.
"""

import copy
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special

from ..core.rng import RngStream
from ..errors import DomainError
from .posterior import BetaParams, posterior_prob_optimal, prob_after_unit_increment
from .spec import PolicyKind, PolicySpec

# Uniforms consumed by the policy at every step, before the reward uniform.
POLICY_UNIFORMS = 2


@dataclass
class PosteriorState:
    """Evolving state of a batch of experiments.

    Attributes:
        alpha: Beta alpha per simulation and arm, shape (k, 2); only updated by TS
        beta: Beta beta per simulation and arm, shape (k, 2); only updated by TS
        pulls: Pull counts n_k, shape (k, 2)
        successes: Success counts S_k, shape (k, 2)
        prob_arm1: TS probability that arm 1 is optimal given the current posterior,
            shape (k,); 0.5 placeholder for the other policies
    """

    alpha: np.ndarray
    beta: np.ndarray
    pulls: np.ndarray
    successes: np.ndarray
    prob_arm1: np.ndarray

    @classmethod
    def initial(cls, spec: PolicySpec, size: int = 1) -> "PosteriorState":
        """Prior state for ``size`` simulations."""
        alpha = np.full((size, 2), spec.ts_prior_alpha, dtype=np.float64)
        beta = np.full((size, 2), spec.ts_prior_beta, dtype=np.float64)
        # Both arms share the prior, so P(theta1 > theta2) starts at exactly 1/2.
        return cls(
            alpha=alpha,
            beta=beta,
            pulls=np.zeros((size, 2), dtype=np.int64),
            successes=np.zeros((size, 2), dtype=np.int64),
            prob_arm1=np.full(size, 0.5, dtype=np.float64),
        )

    @classmethod
    def from_posteriors(cls, post1: BetaParams, post2: BetaParams) -> "PosteriorState":
        """Single-simulation TS state at arbitrary posteriors (counts left at zero)."""
        return cls(
            alpha=np.array([[post1.alpha, post2.alpha]], dtype=np.float64),
            beta=np.array([[post1.beta, post2.beta]], dtype=np.float64),
            pulls=np.zeros((1, 2), dtype=np.int64),
            successes=np.zeros((1, 2), dtype=np.int64),
            prob_arm1=np.array([posterior_prob_optimal(post1, post2)]),
        )

    @classmethod
    def from_counts(
        cls, pulls: Tuple[int, int], successes: Tuple[int, int]
    ) -> "PosteriorState":
        """Single-simulation counts state (for EG and UR)."""
        if any(s < 0 or s > n for s, n in zip(successes, pulls)):
            raise DomainError("successes must lie between 0 and the pull count")
        return cls(
            alpha=np.ones((1, 2)),
            beta=np.ones((1, 2)),
            pulls=np.array([pulls], dtype=np.int64),
            successes=np.array([successes], dtype=np.int64),
            prob_arm1=np.array([0.5]),
        )

    def __len__(self) -> int:
        return self.pulls.shape[0]

    def posterior(self, arm: int, index: int = 0) -> BetaParams:
        """Beta posterior of ``arm`` in simulation ``index``."""
        col = arm - 1
        return BetaParams(float(self.alpha[index, col]), float(self.beta[index, col]))

    def copy(self) -> "PosteriorState":
        return copy.deepcopy(self)


def _greedy_prob_arm1(state: PosteriorState) -> np.ndarray:
    """Probability that the greedy step picks arm 1.

    Unpulled arms count as tied at the maximum; ties split evenly.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        means = np.where(
            state.pulls > 0, state.successes / np.maximum(state.pulls, 1), np.inf
        )
    return np.where(
        means[:, 0] > means[:, 1], 1.0, np.where(means[:, 0] < means[:, 1], 0.0, 0.5)
    )


def assignment_probability(state: PosteriorState, spec: PolicySpec) -> np.ndarray:
    """Probability of assigning arm 1 to the next participant, shape (k,)."""
    if spec.kind is PolicyKind.UNIFORM_RANDOM:
        return np.full(len(state), 0.5)
    if spec.kind is PolicyKind.THOMPSON_SAMPLING:
        return state.prob_arm1.copy()
    epsilon = spec.eg_epsilon
    return (1.0 - epsilon) * _greedy_prob_arm1(state) + epsilon / 2.0


def select_arms(
    state: PosteriorState, spec: PolicySpec, u1: np.ndarray, u2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Choose arms for a batch given two uniforms per simulation.

    - UR: arm 1 iff ``u1 < 1/2``.
    - TS: theta1 is drawn from arm 1's posterior by inverting its CDF at ``u1``;
      arm 2's draw is ``F2^-1(u2)``, and theta1 > theta2 is decided in CDF space as
      ``F2(theta1) > u2``. The argmax is the chosen arm.
    - EG: explore when ``u1 < epsilon`` (uniform arm from ``u2``), otherwise the
      empirical-mean leader, ties broken by ``u2``.

    Returns:
        (arms, pi1): chosen arms in {1, 2} (int8) and the pre-draw probability of arm 1
    """
    pi1 = assignment_probability(state, spec)

    if spec.kind is PolicyKind.UNIFORM_RANDOM:
        pick_arm1 = u1 < 0.5
    elif spec.kind is PolicyKind.THOMPSON_SAMPLING:
        theta1 = special.betaincinv(state.alpha[:, 0], state.beta[:, 0], u1)
        pick_arm1 = special.betainc(state.alpha[:, 1], state.beta[:, 1], theta1) > u2
    else:
        greedy = _greedy_prob_arm1(state)
        coin = u2 < 0.5
        exploit = np.where(greedy == 0.5, coin, greedy == 1.0)
        pick_arm1 = np.where(u1 < spec.eg_epsilon, coin, exploit)

    arms = np.where(pick_arm1, 1, 2).astype(np.int8)
    return arms, pi1


def apply_update(
    state: PosteriorState,
    spec: PolicySpec,
    arms: np.ndarray,
    rewards: np.ndarray,
    weight: Optional[float] = None,
) -> None:
    """Record one observation per simulation, in place.

    Counts always update. For TS the chosen arm's alpha grows by ``w * reward`` and
    beta by ``w * (1 - reward)``; the tracked probability follows the exact unit
    recurrences when ``w`` is integral and is recomputed otherwise.
    """
    rows = np.arange(len(state))
    cols = arms.astype(np.int64) - 1
    successes = rewards.astype(bool)
    state.pulls[rows, cols] += 1
    state.successes[rows, cols] += successes

    if spec.kind is not PolicyKind.THOMPSON_SAMPLING:
        return

    w = spec.ts_update_weight if weight is None else float(weight)
    if w <= 0:
        raise DomainError(f"update weight must be positive, got {w}")

    if float(w).is_integer():
        for _ in range(int(w)):
            params = (state.alpha[:, 0], state.beta[:, 0], state.alpha[:, 1], state.beta[:, 1])
            state.prob_arm1 = prob_after_unit_increment(state.prob_arm1, params, arms, successes)
            state.alpha[rows, cols] += successes
            state.beta[rows, cols] += ~successes
        return

    state.alpha[rows, cols] += w * successes
    state.beta[rows, cols] += w * ~successes
    state.prob_arm1 = np.array(
        [
            posterior_prob_optimal(
                BetaParams(state.alpha[i, 0], state.beta[i, 0]),
                BetaParams(state.alpha[i, 1], state.beta[i, 1]),
            )
            for i in rows
        ]
    )


def select_arm(state: PosteriorState, spec: PolicySpec, stream: RngStream) -> Tuple[int, float]:
    """Choose the arm for the next participant of a single experiment.

    Consumes two uniforms from ``stream``.

    Returns:
        (arm, pi1)
    """
    u = stream.random(POLICY_UNIFORMS)
    arms, pi1 = select_arms(state, spec, u[:1], u[1:])
    return int(arms[0]), float(pi1[0])


def ts_update(state: PosteriorState, arm: int, reward: int, w: float) -> PosteriorState:
    """Return a new TS state after observing ``reward`` on ``arm`` with weight ``w``."""
    if arm not in (1, 2) or reward not in (0, 1):
        raise DomainError(f"invalid observation arm={arm}, reward={reward}")
    updated = state.copy()
    apply_update(
        updated,
        PolicySpec(PolicyKind.THOMPSON_SAMPLING, ts_update_weight=w),
        np.array([arm], dtype=np.int8),
        np.array([reward], dtype=np.int8),
    )
    return updated
