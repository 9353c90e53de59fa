"""Deterministic counter-based random streams."""

from typing import Optional, Tuple, Union

import numpy as np

from ..errors import DomainError

_MAX_SEED = 2**64 - 1


class RngStream:
    """Random stream owned by one simulation.

    The stream is keyed by ``(base_seed, cell_id, sim_index)``. Keys go through
    ``numpy.random.SeedSequence`` with the (cell, sim) pair as spawn key and feed a
    Philox counter-based generator, so any stream can be rebuilt directly without
    replaying the streams that precede it.
    """

    __slots__ = ("_base_seed", "_cell_id", "_sim_index", "_generator")

    def __init__(self, base_seed: int, cell_id: int, sim_index: int):
        """Initialize stream.

        Args:
            base_seed: 64-bit unsigned run seed
            cell_id: Non-negative cell identifier
            sim_index: Non-negative simulation index within the cell

        Raises:
            DomainError: If any key component is out of range
        """
        if not 0 <= int(base_seed) <= _MAX_SEED:
            raise DomainError(f"base_seed must be a 64-bit unsigned integer, got {base_seed}")
        if int(cell_id) < 0 or int(sim_index) < 0:
            raise DomainError(
                f"cell_id and sim_index must be non-negative, got ({cell_id}, {sim_index})"
            )
        self._base_seed = int(base_seed)
        self._cell_id = int(cell_id)
        self._sim_index = int(sim_index)
        seed_seq = np.random.SeedSequence(
            entropy=self._base_seed, spawn_key=(self._cell_id, self._sim_index)
        )
        self._generator = np.random.Generator(np.random.Philox(seed_seq))

    @property
    def base_seed(self) -> int:
        return self._base_seed

    @property
    def cell_id(self) -> int:
        return self._cell_id

    @property
    def sim_index(self) -> int:
        return self._sim_index

    @property
    def key(self) -> Tuple[int, int, int]:
        """The (base_seed, cell_id, sim_index) triple identifying this stream."""
        return (self._base_seed, self._cell_id, self._sim_index)

    def random(
        self, size: Optional[Union[int, Tuple[int, ...]]] = None
    ) -> Union[float, np.ndarray]:
        """Draw uniforms on [0, 1).

        A block draw of ``k`` values yields the same sequence as ``k`` scalar draws.
        """
        if size is None:
            return float(self._generator.random())
        return self._generator.random(size)

    def __repr__(self) -> str:
        return (
            f"RngStream(base_seed={self._base_seed}, cell_id={self._cell_id}, "
            f"sim_index={self._sim_index})"
        )


def derive_stream(base_seed: int, cell_id: int, sim_index: int) -> RngStream:
    """Derive the stream for one simulation.

    Identical inputs give bit-identical streams regardless of call order.
    """
    return RngStream(base_seed, cell_id, sim_index)


def check_probability(p: float, name: str = "p") -> float:
    """Validate that ``p`` is a probability.

    Raises:
        DomainError: If ``p`` is NaN or outside [0, 1]
    """
    value = float(p)
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be in [0, 1], got {p}")
    return value


def bernoulli_draw(p: float, stream: RngStream) -> int:
    """Draw a Bernoulli(p) reward using one uniform from ``stream``.

    Args:
        p: Success probability
        stream: Stream to consume

    Returns:
        1 with probability ``p``, else 0

    Raises:
        DomainError: If ``p`` is outside [0, 1]
    """
    p = check_probability(p)
    return int(stream.random() < p)
