"""Tests for seeded streams and Bernoulli draws."""

import numpy as np
import pytest

from bandit_inference import DomainError, RngStream, bernoulli_draw, derive_stream


def test_same_key_gives_identical_stream():
    """Streams are reproducible from their key alone"""
    a = derive_stream(7, 2, 11).random(100)
    b = derive_stream(7, 2, 11).random(100)
    assert np.array_equal(a, b)


def test_streams_do_not_depend_on_derivation_order():
    first = [derive_stream(1, 0, i).random(5) for i in range(4)]
    reverse = [derive_stream(1, 0, i).random(5) for i in reversed(range(4))][::-1]
    for x, y in zip(first, reverse):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("other", [(2, 0, 0), (1, 1, 0), (1, 0, 1)])
def test_distinct_keys_give_distinct_streams(other):
    base = derive_stream(1, 0, 0).random(8)
    assert not np.array_equal(base, derive_stream(*other).random(8))


def test_block_draw_matches_scalar_draws():
    block = derive_stream(3, 4, 5).random((4, 3)).ravel()
    stream = derive_stream(3, 4, 5)
    scalars = [stream.random() for _ in range(12)]
    assert block.tolist() == scalars


def test_uniform_mean():
    draws = derive_stream(0, 0, 0).random(1_000_000)
    assert draws.mean() == pytest.approx(0.5, abs=0.002)


def test_key_and_repr():
    stream = RngStream(9, 1, 2)
    assert stream.key == (9, 1, 2)
    assert "sim_index=2" in repr(stream)


@pytest.mark.parametrize("key", [(-1, 0, 0), (2**64, 0, 0), (0, -1, 0), (0, 0, -1)])
def test_invalid_keys_are_rejected(key):
    with pytest.raises(DomainError):
        RngStream(*key)


def test_bernoulli_extremes():
    stream = derive_stream(5, 0, 0)
    assert all(bernoulli_draw(0.0, stream) == 0 for _ in range(200))
    assert all(bernoulli_draw(1.0, stream) == 1 for _ in range(200))


def test_bernoulli_frequency():
    stream = derive_stream(5, 0, 1)
    draws = [bernoulli_draw(0.3, stream) for _ in range(20000)]
    assert abs(np.mean(draws) - 0.3) < 4 * np.sqrt(0.3 * 0.7 / 20000)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_bernoulli_rejects_invalid_probability(p):
    with pytest.raises(DomainError):
        bernoulli_draw(p, derive_stream(0, 0, 0))
