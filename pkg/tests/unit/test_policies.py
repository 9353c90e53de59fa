"""Tests for policy specs, arm selection and posterior updates."""

import numpy as np
import pytest

from bandit_inference import (
    BetaParams,
    ConfigError,
    DomainError,
    PolicyKind,
    PolicySpec,
    PosteriorState,
    derive_stream,
    posterior_prob_optimal,
    select_arm,
    ts_update,
)
from bandit_inference.policies import apply_update, assignment_probability, select_arms


class TestPolicySpec:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("ur", PolicySpec.uniform_random()),
            ("ts", PolicySpec.thompson()),
            ("ts:alpha=0.5,beta=0.5", PolicySpec.thompson(0.5, 0.5)),
            ("ts:alpha=19,beta=1,w=10", PolicySpec.thompson(19, 1, 10)),
            ("eg", PolicySpec.epsilon_greedy(0.1)),
            ("eg:epsilon=0.2", PolicySpec.epsilon_greedy(0.2)),
            ("Thompson", PolicySpec.thompson()),
        ],
    )
    def test_parse(self, text, expected):
        assert PolicySpec.parse(text) == expected

    @pytest.mark.parametrize(
        "spec",
        [
            PolicySpec.uniform_random(),
            PolicySpec.thompson(),
            PolicySpec.thompson(0.5, 0.5),
            PolicySpec.thompson(19, 1, 10),
            PolicySpec.epsilon_greedy(0.1),
        ],
    )
    def test_label_parses_back(self, spec):
        assert PolicySpec.parse(spec.label) == spec

    def test_labels(self):
        assert PolicySpec.thompson().label == "ts:alpha=1,beta=1"
        assert PolicySpec.thompson(19, 1, 10).label == "ts:alpha=19,beta=1,w=10"
        assert str(PolicySpec.epsilon_greedy(0.1)) == "eg:epsilon=0.1"

    @pytest.mark.parametrize(
        "text", ["greedy", "ts:gamma=2", "eg:epsilon=x", "ts:alpha=-1", "ur:alpha=1"]
    )
    def test_parse_errors(self, text):
        with pytest.raises(ConfigError):
            PolicySpec.parse(text)

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            PolicySpec.thompson(alpha=0)
        with pytest.raises(DomainError):
            PolicySpec.epsilon_greedy(1.5)
        with pytest.raises(DomainError):
            PolicySpec.thompson(weight=0)


def _replicated_state(post1: BetaParams, post2: BetaParams, size: int) -> PosteriorState:
    single = PosteriorState.from_posteriors(post1, post2)
    return PosteriorState(
        alpha=np.repeat(single.alpha, size, axis=0),
        beta=np.repeat(single.beta, size, axis=0),
        pulls=np.repeat(single.pulls, size, axis=0),
        successes=np.repeat(single.successes, size, axis=0),
        prob_arm1=np.repeat(single.prob_arm1, size),
    )


class TestSelection:
    def test_uniform_random(self, ur):
        state = PosteriorState.initial(ur, 4)
        arms, pi1 = select_arms(state, ur, np.array([0.1, 0.49, 0.5, 0.9]), np.zeros(4))
        assert arms.tolist() == [1, 1, 2, 2]
        assert pi1.tolist() == [0.5] * 4

    @pytest.mark.parametrize(
        "post1, post2",
        [
            (BetaParams(1, 1), BetaParams(1, 1)),
            (BetaParams(2, 1), BetaParams(1, 1)),
            (BetaParams(5, 3), BetaParams(3, 5)),
            (BetaParams(40, 38), BetaParams(35, 41)),
            (BetaParams(19.5, 11), BetaParams(29, 1)),
        ],
    )
    def test_thompson_frequency_matches_probability(self, ts, post1, post2):
        """Empirical arm-1 frequency agrees with P(theta1 > theta2) within 3 SE"""
        size = 20000
        state = _replicated_state(post1, post2, size)
        rng = np.random.default_rng(12345)
        arms, pi1 = select_arms(state, ts, rng.random(size), rng.random(size))
        expected = posterior_prob_optimal(post1, post2)
        assert pi1[0] == pytest.approx(expected)
        se = np.sqrt(max(expected * (1 - expected), 1e-4) / size)
        assert abs(np.mean(arms == 1) - expected) < 3 * se

    def test_epsilon_greedy_probabilities(self, eg):
        state = PosteriorState.from_counts(pulls=(10, 10), successes=(6, 4))
        assert assignment_probability(state, eg)[0] == pytest.approx(0.95)

        untried = PosteriorState.from_counts(pulls=(0, 0), successes=(0, 0))
        assert assignment_probability(untried, eg)[0] == pytest.approx(0.5)

        one_untried = PosteriorState.from_counts(pulls=(1, 0), successes=(0, 0))
        assert assignment_probability(one_untried, eg)[0] == pytest.approx(0.05)

    def test_epsilon_greedy_uniform_usage(self, eg):
        state = PosteriorState.from_counts(pulls=(10, 10), successes=(6, 4))
        exploit, _ = select_arms(state, eg, np.array([0.5]), np.array([0.9]))
        explore_arm2, _ = select_arms(state, eg, np.array([0.05]), np.array([0.9]))
        explore_arm1, _ = select_arms(state, eg, np.array([0.05]), np.array([0.1]))
        assert (exploit[0], explore_arm2[0], explore_arm1[0]) == (1, 2, 1)

    def test_epsilon_greedy_tie_break(self, eg):
        state = PosteriorState.from_counts(pulls=(4, 4), successes=(2, 2))
        arms, pi1 = select_arms(state, eg, np.array([0.9, 0.9]), np.array([0.2, 0.8]))
        assert arms.tolist() == [1, 2]
        assert pi1[0] == pytest.approx(0.5)

    def test_select_arm_consumes_two_uniforms(self, ts):
        state = PosteriorState.initial(ts)
        stream = derive_stream(1, 0, 0)
        select_arm(state, ts, stream)
        reference = derive_stream(1, 0, 0)
        reference.random(2)
        assert stream.random() == reference.random()


class TestUpdates:
    def test_weighted_update_classroom_prior(self):
        spec = PolicySpec.thompson(19, 1, 10)
        state = PosteriorState.initial(spec)
        updated = ts_update(state, arm=1, reward=0, w=10)
        assert updated.posterior(1) == BetaParams(19, 11)
        assert updated.posterior(2) == BetaParams(19, 1)
        assert state.posterior(1) == BetaParams(19, 1)
        expected = posterior_prob_optimal(BetaParams(19, 11), BetaParams(19, 1))
        assert updated.prob_arm1[0] == pytest.approx(expected, abs=1e-9)

    def test_parameter_sum_grows_by_weight(self):
        state = PosteriorState.initial(PolicySpec.thompson(1, 1, 3))
        for arm, reward in [(1, 1), (2, 0), (1, 0), (1, 1)]:
            state = ts_update(state, arm, reward, 3)
        total = state.alpha[0] + state.beta[0]
        assert total.tolist() == [2 + 3 * 3, 2 + 3 * 1]
        assert state.pulls[0].tolist() == [3, 1]

    def test_fractional_weight_recomputes(self):
        state = PosteriorState.initial(PolicySpec.thompson())
        updated = ts_update(state, arm=2, reward=1, w=2.5)
        assert updated.posterior(2) == BetaParams(3.5, 1)
        expected = posterior_prob_optimal(BetaParams(1, 1), BetaParams(3.5, 1))
        assert updated.prob_arm1[0] == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("prior", [(1.0, 1.0), (0.5, 0.5), (19.0, 1.0)])
    def test_incremental_probability_tracks_direct_computation(self, prior):
        """Recurrence-tracked probability agrees with fresh evaluation along a trajectory"""
        spec = PolicySpec.thompson(*prior)
        state = PosteriorState.initial(spec)
        rng = np.random.default_rng(7)
        for _ in range(60):
            arms = np.array([rng.integers(1, 3)], dtype=np.int8)
            rewards = np.array([rng.random() < 0.5], dtype=np.int8)
            apply_update(state, spec, arms, rewards)
            direct = posterior_prob_optimal(state.posterior(1), state.posterior(2))
            assert state.prob_arm1[0] == pytest.approx(direct, abs=1e-9)

    def test_non_ts_policies_only_count(self, eg):
        state = PosteriorState.initial(eg, 2)
        apply_update(state, eg, np.array([1, 2], dtype=np.int8), np.array([1, 0], dtype=np.int8))
        assert state.pulls.tolist() == [[1, 0], [0, 1]]
        assert state.successes.tolist() == [[1, 0], [0, 0]]
        assert state.alpha.tolist() == [[1.0, 1.0], [1.0, 1.0]]

    def test_invalid_observation(self, ts):
        with pytest.raises(DomainError):
            ts_update(PosteriorState.initial(ts), arm=3, reward=1, w=1)

    def test_kind_enum_values(self):
        assert [k.value for k in PolicyKind] == ["ur", "ts", "eg"]
