"""Tests for environment, step and log types."""

import pytest

from bandit_inference import DataIntegrityError, DomainError, EnvSpec, StepRecord, TrialLog


def test_env_validation():
    with pytest.raises(DomainError):
        EnvSpec(p1=1.2, p2=0.5, horizon=10)
    with pytest.raises(DomainError):
        EnvSpec(p1=0.5, p2=0.5, horizon=0)


def test_env_helpers():
    env = EnvSpec(p1=0.55, p2=0.45, horizon=785)
    assert not env.is_null
    assert env.arm_mean(2) == 0.45
    assert env.swapped() == EnvSpec(p1=0.45, p2=0.55, horizon=785)
    assert EnvSpec(0.25, 0.25, 5).is_null


@pytest.mark.parametrize(
    "kwargs",
    [
        {"arm": 3, "reward": 1, "pi1": 0.5},
        {"arm": 1, "reward": 2, "pi1": 0.5},
        {"arm": 1, "reward": 0, "pi1": 1.5},
    ],
)
def test_step_validation(kwargs):
    with pytest.raises(DomainError):
        StepRecord(t=1, **kwargs)


def test_step_assignment_probability():
    assert StepRecord(t=1, arm=2, reward=0, pi1=0.8).assignment_probability() == pytest.approx(0.2)
    assert StepRecord(t=1, arm=1, reward=0, pi1=0.8).assignment_probability() == 0.8


def test_log_length_must_match_horizon(make_log):
    steps = [StepRecord(t=1, arm=1, reward=1, pi1=0.5)]
    with pytest.raises(DataIntegrityError):
        TrialLog(env=EnvSpec(0.5, 0.5, 2), policy=None, steps=steps)


def test_log_arrays_and_swap(make_log):
    log = make_log([(1, 1, 0.5), (2, 0, 0.25), (2, 1, 0.4)])
    arms, rewards, pi1 = log.as_arrays()
    assert arms.tolist() == [1, 2, 2]
    assert rewards.tolist() == [1, 0, 1]
    assert log.mean_reward() == pytest.approx(2 / 3)

    swapped = log.swapped()
    assert swapped.as_arrays()[0].tolist() == [2, 1, 1]
    assert swapped.as_arrays()[2].tolist() == pytest.approx([0.5, 0.75, 0.6])
