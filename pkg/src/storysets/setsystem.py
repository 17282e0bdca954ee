"""Uncertain set systems and their bin-matrix encoding.

Rows of a bin matrix are sets (curves), columns are elements. Bins are
1-based: bin 1 means "certainly not a member", bin ``k`` means "certainly a
member". Curve and element *indices* are 0-based like everything else in
Python.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_LEVEL_ATOL = 1e-9


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UncertaintyLevels:
    """Strictly increasing certainty levels, from 0 up to 1."""

    levels: tuple[float, ...]

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise ValueError("need at least two uncertainty levels")
        if levels[0] != 0.0 or levels[-1] != 1.0:
            raise ValueError(f"levels must start at 0 and end at 1, got {levels}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly increasing, got {levels}")

    @property
    def k(self) -> int:
        return len(self.levels)

    def bin_of(self, value: float) -> int:
        """1-based bin of a level value; raises if ``value`` is not a level."""
        for p, level in enumerate(self.levels, start=1):
            if abs(level - value) <= _LEVEL_ATOL:
                return p
        raise ValueError(f"value {value!r} is not one of the levels {self.levels}")


@dataclass(frozen=True)
class UncertainSetSystem:
    element_names: tuple[str, ...]
    set_names: tuple[str, ...]
    levels: UncertaintyLevels
    beta: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "element_names", tuple(self.element_names))
        object.__setattr__(self, "set_names", tuple(self.set_names))
        if not isinstance(self.levels, UncertaintyLevels):
            object.__setattr__(self, "levels", UncertaintyLevels(tuple(self.levels)))
        beta = _frozen_array(self.beta, float)
        object.__setattr__(self, "beta", beta)
        m, n = len(self.set_names), len(self.element_names)
        if n < 1 or m < 1:
            raise ValueError("a set system needs at least one element and one set")
        if beta.shape != (m, n):
            raise ValueError(f"beta has shape {beta.shape}, expected {(m, n)}")
        for (i, j), v in np.ndenumerate(beta):
            try:
                self.levels.bin_of(v)
            except ValueError:
                raise ValueError(
                    f"beta[{self.set_names[i]!r}][{self.element_names[j]!r}] = {v} "
                    "is not an uncertainty level"
                ) from None

    @property
    def m(self) -> int:
        return len(self.set_names)

    @property
    def n(self) -> int:
        return len(self.element_names)


@dataclass(frozen=True)
class BinMatrix:
    """m x n matrix of 1-based bin indices."""

    bins: np.ndarray = field(repr=False)
    k: int

    def __post_init__(self):
        bins = _frozen_array(self.bins, np.int64)
        if bins.ndim != 2:
            raise ValueError(f"bin matrix must be 2-D, got shape {bins.shape}")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if bins.size and (bins.min() < 1 or bins.max() > self.k):
            raise ValueError(f"bins must lie in [1, {self.k}]")
        object.__setattr__(self, "bins", bins)

    @property
    def m(self) -> int:
        return self.bins.shape[0]

    @property
    def n(self) -> int:
        return self.bins.shape[1]

    def permuted(self, pi: Sequence[int]) -> "BinMatrix":
        """Columns reordered so that column ``p`` is element ``pi[p]``."""
        return BinMatrix(self.bins[:, list(pi)], self.k)

    def __eq__(self, other):
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.bins, other.bins)

    __hash__ = None


@dataclass(frozen=True)
class KernelGroups:
    """Curves grouped by identical bin vectors.

    ``members[g]`` lists the duplicates that ``representatives[g]`` stands
    for, in ascending index order (the representative itself excluded).
    """

    representatives: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]

    def expand(self, rep_order: Sequence[int]) -> list[int]:
        """Reinsert duplicates below their representatives.

        ``rep_order`` lists representatives bottom to top. Duplicates of a
        representative end up directly beneath it, ascending index order
        from the bottom.
        """
        lookup = dict(zip(self.representatives, self.members))
        out: list[int] = []
        for rep in rep_order:
            out.extend(lookup[rep])
            out.append(rep)
        return out


def bin_from_beta(system: UncertainSetSystem) -> BinMatrix:
    levels = system.levels
    bins = [[levels.bin_of(v) for v in row] for row in system.beta]
    return BinMatrix(np.array(bins, dtype=np.int64).reshape(system.m, system.n), levels.k)


def bin_from_raw(raw, boundaries: Sequence[float]) -> BinMatrix:
    """Bin raw certainty values with half-open intervals ``[b[p-1], b[p])``.

    The last interval is closed at 1.0, so a value of exactly 1 lands in
    the top bin.
    """
    bounds = np.asarray(boundaries, dtype=float)
    if bounds.ndim != 1 or len(bounds) < 3:
        raise ValueError("need at least three boundaries (two bins)")
    if bounds[0] != 0.0 or bounds[-1] != 1.0:
        raise ValueError(f"boundaries must start at 0 and end at 1, got {list(bounds)}")
    if np.any(np.diff(bounds) <= 0):
        raise ValueError(f"boundaries must be strictly increasing, got {list(bounds)}")
    values = np.asarray(raw, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"raw values must be a 2-D matrix, got shape {values.shape}")
    bad = ~((values >= 0.0) & (values <= 1.0))
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise ValueError(f"raw value {values[i, j]} at ({i}, {j}) is outside [0, 1]")
    k = len(bounds) - 1
    bins = np.searchsorted(bounds, values, side="right")
    return BinMatrix(np.minimum(bins, k), k)


def is_uncertain_subset(B: BinMatrix, s: int, s_prime: int) -> bool:
    """True iff curve ``s`` never has a higher bin than ``s_prime``."""
    return bool(np.all(B.bins[s] <= B.bins[s_prime]))


def kernelize(B: BinMatrix) -> KernelGroups:
    first_seen: dict[bytes, int] = {}
    groups: dict[int, list[int]] = {}
    for i in range(B.m):
        key = B.bins[i].tobytes()
        rep = first_seen.setdefault(key, i)
        if rep == i:
            groups[i] = []
        else:
            groups[rep].append(i)
    reps = tuple(groups)
    return KernelGroups(reps, tuple(tuple(groups[r]) for r in reps))


def append_dummy(B: BinMatrix) -> BinMatrix:
    """Append the all-bin-1 column standing for the TSP dummy vertex."""
    return BinMatrix(np.hstack([B.bins, np.ones((B.m, 1), dtype=np.int64)]), B.k)
