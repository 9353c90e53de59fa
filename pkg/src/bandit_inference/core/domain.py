"""Domain types shared by every module."""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np

from ..errors import DataIntegrityError, DomainError
from .rng import check_probability

if TYPE_CHECKING:
    from ..policies.spec import PolicySpec


@dataclass(frozen=True)
class EnvSpec:
    """Two-arm Bernoulli environment: true success probabilities and horizon."""

    p1: float
    p2: float
    horizon: int

    def __post_init__(self) -> None:
        check_probability(self.p1, "p1")
        check_probability(self.p2, "p2")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DomainError(f"horizon must be a positive integer, got {self.horizon}")

    @property
    def is_null(self) -> bool:
        """True when both arms share the same mean."""
        return self.p1 == self.p2

    def arm_mean(self, arm: int) -> float:
        return self.p1 if arm == 1 else self.p2

    def swapped(self) -> "EnvSpec":
        return EnvSpec(p1=self.p2, p2=self.p1, horizon=self.horizon)


@dataclass(frozen=True)
class StepRecord:
    """One assignment: the arm, its reward and the pre-draw arm-1 probability."""

    t: int
    arm: int
    reward: int
    pi1: float

    def __post_init__(self) -> None:
        if self.arm not in (1, 2):
            raise DomainError(f"arm must be 1 or 2, got {self.arm}")
        if self.reward not in (0, 1):
            raise DomainError(f"reward must be 0 or 1, got {self.reward}")
        check_probability(self.pi1, "pi1")

    @property
    def pi2(self) -> float:
        return 1.0 - self.pi1

    def assignment_probability(self) -> float:
        """Probability of the arm that was actually pulled."""
        return self.pi1 if self.arm == 1 else self.pi2


@dataclass
class TrialLog:
    """Per-step record of one adaptive experiment.

    ``env`` and ``policy`` are ``None`` for logs read from an external file, where
    only the steps are known.
    """

    env: Optional[EnvSpec]
    policy: Optional["PolicySpec"]
    steps: List[StepRecord]
    sim_id: int = 0
    # Not part of the logged steps, so excluded from equality.
    final_pi1: Optional[float] = field(default=None, compare=False)
    _arrays: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.env is not None and len(self.steps) != self.env.horizon:
            raise DataIntegrityError(
                f"log has {len(self.steps)} steps but horizon is {self.env.horizon}"
            )

    @property
    def horizon(self) -> int:
        return len(self.steps)

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (arms, rewards, pi1) as numpy arrays."""
        if self._arrays is None:
            arms = np.fromiter((s.arm for s in self.steps), dtype=np.int8, count=len(self.steps))
            rewards = np.fromiter(
                (s.reward for s in self.steps), dtype=np.int8, count=len(self.steps)
            )
            pi1 = np.fromiter((s.pi1 for s in self.steps), dtype=np.float64, count=len(self.steps))
            self._arrays = (arms, rewards, pi1)
        return self._arrays

    def mean_reward(self) -> float:
        _, rewards, _ = self.as_arrays()
        return float(rewards.mean()) if len(rewards) else float("nan")

    def swapped(self) -> "TrialLog":
        """The same experiment with the arm labels exchanged."""
        steps = [StepRecord(s.t, 3 - s.arm, s.reward, 1.0 - s.pi1) for s in self.steps]
        return TrialLog(
            env=self.env.swapped() if self.env is not None else None,
            policy=self.policy,
            steps=steps,
            sim_id=self.sim_id,
            final_pi1=None if self.final_pi1 is None else 1.0 - self.final_pi1,
        )
