"""Discrete 6-dimensional board-configuration space.

A configuration assigns one level to each of six ordered dimensions
(big-cluster CPU count, frequency, utilization; same for the little
cluster).  Inputs are index tuples into the per-dimension level lists;
the continuous encoding maps each index onto an evenly spaced grid in
[-1, 1] so network outputs can be snapped back onto the grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

# A test input is a tuple of six level indices, one per dimension.
TestInput = tuple[int, ...]

NUM_DIMENSIONS = 6

DIMENSION_ROLES = (
    "big_cpus",
    "big_freq",
    "big_util",
    "little_cpus",
    "little_freq",
    "little_util",
)


@dataclass(frozen=True)
class Dimension:
    """One configuration axis: a name and its ordered physical levels."""

    name: str
    levels: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.levels) == 0:
            raise ValueError(f"dimension {self.name!r}: levels must be nonempty")
        for lo, hi in zip(self.levels, self.levels[1:]):
            if not lo < hi:
                raise ValueError(
                    f"dimension {self.name!r}: levels must be strictly increasing"
                )


@dataclass(frozen=True)
class InputSpace:
    """Cartesian product of exactly six dimensions, in cluster order.

    Positional convention: dims[0:3] are the big cluster's CPU count,
    frequency and utilization; dims[3:6] the little cluster's.
    """

    dims: tuple[Dimension, ...]

    def __post_init__(self) -> None:
        if len(self.dims) != NUM_DIMENSIONS:
            raise ValueError(f"input space needs exactly {NUM_DIMENSIONS} dimensions")

    @property
    def level_counts(self) -> tuple[int, ...]:
        return tuple(len(d.levels) for d in self.dims)

    def validate_input(self, test_input: TestInput) -> None:
        if len(test_input) != NUM_DIMENSIONS:
            raise ValueError(f"input must have {NUM_DIMENSIONS} indices")
        for j, (idx, dim) in enumerate(zip(test_input, self.dims)):
            if not 0 <= idx < len(dim.levels):
                raise ValueError(
                    f"index {idx} out of range for dimension {j} ({dim.name!r})"
                )

    def physical_values(self, test_input: TestInput) -> tuple[float, ...]:
        """Map level indices to the physical level values."""
        self.validate_input(test_input)
        return tuple(d.levels[i] for d, i in zip(self.dims, test_input))


def default_space() -> InputSpace:
    """Synthetic big.LITTLE configuration grid (665,000 points).

    0-4 CPUs per cluster, 100 MHz frequency steps (big: 200-2000 MHz,
    little: 200-1500 MHz), ten utilization levels from 10% to 100%.
    """
    utilization = tuple((i + 1) / 10 for i in range(10))
    return InputSpace(
        dims=(
            Dimension("big_cpus", tuple(float(n) for n in range(5))),
            Dimension("big_freq", tuple(float(f) for f in range(200, 2001, 100))),
            Dimension("big_util", utilization),
            Dimension("little_cpus", tuple(float(n) for n in range(5))),
            Dimension("little_freq", tuple(float(f) for f in range(200, 1501, 100))),
            Dimension("little_util", utilization),
        )
    )


def cardinality(space: InputSpace) -> int:
    """Number of distinct configurations in the space."""
    return math.prod(space.level_counts)


def normalize(space: InputSpace, test_input: TestInput) -> np.ndarray:
    """Encode a grid input as a vector in [-1, 1]^6.

    Component j is -1 + 2*index/(L-1) for an L-level dimension; a
    single-level dimension encodes as 0.
    """
    space.validate_input(test_input)
    out = np.zeros(NUM_DIMENSIONS)
    for j, (idx, count) in enumerate(zip(test_input, space.level_counts)):
        if count > 1:
            out[j] = -1.0 + 2.0 * idx / (count - 1)
    return out


def normalize_batch(space: InputSpace, inputs: Iterable[TestInput]) -> np.ndarray:
    """Vectorized :func:`normalize` over many inputs; returns (k, 6)."""
    idx = np.asarray(list(inputs), dtype=np.int64)
    if idx.size == 0:
        return np.zeros((0, NUM_DIMENSIONS))
    counts = np.asarray(space.level_counts, dtype=np.float64)
    denom = np.maximum(counts - 1.0, 1.0)
    out = -1.0 + 2.0 * idx / denom
    out[:, counts == 1] = 0.0
    return out


def snap(space: InputSpace, vector: np.ndarray) -> TestInput:
    """Map a continuous vector in [-1, 1]^6 to the nearest grid input.

    Exact midpoints between two grid levels resolve to the lower index.
    """
    vec = np.asarray(vector, dtype=np.float64).reshape(-1)
    if vec.shape[0] != NUM_DIMENSIONS:
        raise ValueError(f"vector must have {NUM_DIMENSIONS} components")
    indices = []
    for j, count in enumerate(space.level_counts):
        if count == 1:
            indices.append(0)
            continue
        x = (vec[j] + 1.0) * (count - 1) / 2.0
        # nearest integer with exact .5 ties resolving downward
        idx = int(math.ceil(x - 0.5))
        indices.append(min(max(idx, 0), count - 1))
    return tuple(indices)


def rank(space: InputSpace, test_input: TestInput) -> int:
    """Lexicographic position of an input within :func:`enumerate_inputs`."""
    r = 0
    for idx, count in zip(test_input, space.level_counts):
        r = r * count + idx
    return r


def unrank(space: InputSpace, r: int) -> TestInput:
    """Inverse of :func:`rank`."""
    counts = space.level_counts
    out = [0] * NUM_DIMENSIONS
    for j in range(NUM_DIMENSIONS - 1, -1, -1):
        r, out[j] = divmod(r, counts[j])
    return tuple(out)


def enumerate_inputs(space: InputSpace) -> Iterator[TestInput]:
    """Yield every input exactly once, lexicographic by level indices."""
    return itertools.product(*(range(c) for c in space.level_counts))


def sample_uniform(
    space: InputSpace,
    exclude: set[TestInput],
    k: int,
    rng: np.random.Generator,
) -> list[TestInput]:
    """Draw k distinct inputs uniformly, without replacement, outside `exclude`.

    Raises ValueError when fewer than k inputs remain.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    total = cardinality(space)
    excluded_ranks = {rank(space, t) for t in exclude}
    available = total - len(excluded_ranks)
    if k > available:
        raise ValueError(
            f"cannot sample {k} inputs: only {available} of {total} remain"
        )
    if k == 0:
        return []

    if k > available // 4:
        # dense request: materialize the remaining pool and choose exactly
        pool = np.arange(total, dtype=np.int64)
        if excluded_ranks:
            mask = np.ones(total, dtype=bool)
            mask[np.fromiter(excluded_ranks, dtype=np.int64)] = False
            pool = pool[mask]
        chosen = rng.choice(pool, size=k, replace=False)
        return [unrank(space, int(r)) for r in chosen]

    # sparse request: batched rejection sampling stays exactly uniform
    seen = set(excluded_ranks)
    chosen_ranks: list[int] = []
    while len(chosen_ranks) < k:
        need = k - len(chosen_ranks)
        draw = rng.integers(0, total, size=need + max(16, need // 4))
        for r in draw:
            r = int(r)
            if r in seen:
                continue
            seen.add(r)
            chosen_ranks.append(r)
            if len(chosen_ranks) == k:
                break
    return [unrank(space, r) for r in chosen_ranks]
