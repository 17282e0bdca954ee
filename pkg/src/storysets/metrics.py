"""Layout quality metrics and a brute-force minimum-crossing oracle."""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from .curve_order import CurveLayout
from .setsystem import BinMatrix
from .tsp import CapacityError, ElementOrder

ORACLE_MAX_CURVES = 6
ORACLE_MAX_ELEMENTS = 7


@dataclass(frozen=True)
class LayoutMetrics:
    crossings: int
    turns: int
    wiggle: int
    runtime_ms: float = 0.0
    iterations_used: int = 1

    def record(self) -> dict:
        return {
            "CR": self.crossings,
            "T_Sigma": self.turns,
            "wiggle": self.wiggle,
            "runtime_ms": round(self.runtime_ms, 3),
            "iterations_used": self.iterations_used,
        }

    def as_dict(self) -> dict:
        return asdict(self)


def count_inversions(seq) -> int:
    """Number of pairs ``i < j`` with ``seq[i] > seq[j]`` (merge sort)."""
    seq = list(seq)
    if len(seq) < 2:
        return 0
    buf = seq[:]
    width = 1
    inv = 0
    n = len(seq)
    src, dst = seq, buf
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[i] <= src[j]:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    inv += mid - i
                    j += 1
                k += 1
            dst[k:hi] = src[i:mid] if i < mid else src[j:hi]
        src, dst = dst, src
        width *= 2
    return inv


def _transitions(layout: CurveLayout):
    pos = layout.positions
    pairs = list(zip(range(layout.n - 1), range(1, layout.n)))
    if layout.order.mode == "cycle" and layout.n > 2:
        pairs.append((layout.n - 1, 0))
    return [(pos[a], pos[b]) for a, b in pairs]


def crossings(layout: CurveLayout) -> int:
    total = 0
    for before, after in _transitions(layout):
        stack = np.argsort(before)
        total += count_inversions(after[stack].tolist())
    return total


def turns(layout: CurveLayout) -> int:
    return int(sum(np.count_nonzero(a != b) for a, b in _transitions(layout)))


def wiggle(layout: CurveLayout) -> int:
    return int(sum(np.abs(a - b).sum() for a, b in _transitions(layout)))


def compute_metrics(layout: CurveLayout, runtime_ms: float = 0.0, iterations_used: int = 1) -> LayoutMetrics:
    return LayoutMetrics(crossings(layout), turns(layout), wiggle(layout), runtime_ms, iterations_used)


def _column_states(column: np.ndarray) -> np.ndarray:
    """All bin-consistent position vectors for one column."""
    groups = [np.nonzero(column == b)[0] for b in np.unique(column)]
    states = []
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        pos = np.empty(len(column), dtype=np.int64)
        pos[list(itertools.chain.from_iterable(perms))] = np.arange(len(column))
        states.append(pos)
    return np.array(states)


def _pair_signs(states: np.ndarray) -> np.ndarray:
    iu, ju = np.triu_indices(states.shape[1], 1)
    return np.sign(states[:, iu] - states[:, ju]).astype(float)


def min_crossings_oracle(B: BinMatrix, order: ElementOrder) -> int:
    """Minimum crossings over all bin-consistent layouts, by DP over columns.

    States are the bin-consistent permutations of each column; the transition
    cost is the number of discordant curve pairs. Only consecutive columns of
    the linear sequence are counted, even for a cycle-mode order.
    """
    m, n = B.m, B.n
    if m > ORACLE_MAX_CURVES or n > ORACLE_MAX_ELEMENTS:
        raise CapacityError(
            f"oracle handles m <= {ORACLE_MAX_CURVES}, n <= {ORACLE_MAX_ELEMENTS}; got m={m}, n={n}"
        )
    if m < 2:
        return 0
    cols = B.bins[:, list(order.pi)]
    npairs = m * (m - 1) // 2
    states = _column_states(cols[:, 0])
    signs = _pair_signs(states)
    cost = np.zeros(len(states))
    for p in range(1, n):
        nxt = _column_states(cols[:, p])
        nxt_signs = _pair_signs(nxt)
        # discordant pairs = (pairs - concordance) / 2, signs are all +-1
        trans = (npairs - signs @ nxt_signs.T) / 2
        cost = np.min(cost[:, None] + trans, axis=0)
        signs = nxt_signs
    return int(round(cost.min()))
