"""Crossing-minimal vertical order of set curves for a fixed element order.

Positions are 0-based with 0 at the bottom: a curve in a lower bin always
gets a lower position than a curve in a higher bin at the same element.

The first element is ordered by a lookahead: two curves compare by their
bins at the first column where they differ, which is lexicographic order of
the column-permuted bin vectors. Every later element is a stable sort by bin
of the previous order, so curves sharing a bin keep their relative order.
Each pair of curves then swaps exactly when the sign of their bin
difference flips, which is the fewest swaps any bin-consistent layout can
make.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .setsystem import BinMatrix, kernelize
from .tsp import ElementOrder


@dataclass(frozen=True)
class CurveLayout:
    """Per-element curve positions.

    ``positions[p, s]`` is the position of curve ``s`` at the element shown
    at position ``p`` of ``order`` (that is, element ``order.pi[p]``).
    """

    positions: np.ndarray = field(repr=False)
    order: ElementOrder

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.int64, copy=True)
        if pos.ndim != 2 or pos.shape[0] != len(self.order):
            raise ValueError(f"positions shape {pos.shape} does not match {len(self.order)} elements")
        m = pos.shape[1]
        expected = np.arange(m)
        for p, row in enumerate(pos):
            if not np.array_equal(np.sort(row), expected):
                raise ValueError(f"positions at element slot {p} are not a bijection")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def m(self) -> int:
        return self.positions.shape[1]

    def by_element(self) -> np.ndarray:
        """Positions indexed by original element id instead of slot."""
        out = np.empty_like(self.positions)
        out[list(self.order.pi)] = self.positions
        return out

    def stack(self, p: int) -> list[int]:
        """Curves at slot ``p``, bottom to top."""
        return np.argsort(self.positions[p], kind="stable").tolist()

    def flipped(self) -> "CurveLayout":
        return CurveLayout(self.m - 1 - self.positions, self.order)


def precedes(B_pi: BinMatrix, s: int, s_prime: int) -> Literal["below", "above"]:
    """Whether ``s`` goes below or above ``s_prime`` by lookahead."""
    diff = np.nonzero(B_pi.bins[s] != B_pi.bins[s_prime])[0]
    if not len(diff):
        raise ValueError(f"curves {s} and {s_prime} have identical bin vectors; kernelize first")
    j = diff[0]
    return "below" if B_pi.bins[s, j] < B_pi.bins[s_prime, j] else "above"


def initial_order(B_pi: BinMatrix) -> np.ndarray:
    """Positions at the first element for curves with distinct bin vectors."""
    stack = sorted(range(B_pi.m), key=lambda s: tuple(B_pi.bins[s]))
    pos = np.empty(B_pi.m, dtype=np.int64)
    pos[stack] = np.arange(B_pi.m)
    return pos


def order_curves(B: BinMatrix, order: ElementOrder) -> CurveLayout:
    n, m = len(order), B.m
    if n != B.n:
        raise ValueError(f"order has {n} elements, bin matrix has {B.n}")
    groups = kernelize(B)
    reps = np.array(groups.representatives, dtype=np.int64)
    R = B.bins[reps][:, list(order.pi)]
    positions = np.empty((n, m), dtype=np.int64)
    if m == 0:
        return CurveLayout(positions, order)
    # stack holds rows of R bottom to top
    stack = np.array(sorted(range(len(reps)), key=lambda r: tuple(R[r])), dtype=np.int64)
    ranks = np.arange(m)
    for p in range(n):
        if p:
            stack = stack[np.argsort(R[stack, p], kind="stable")]
        full = groups.expand(reps[stack].tolist())
        positions[p, full] = ranks
    return CurveLayout(positions, order)
