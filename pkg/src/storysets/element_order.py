"""Element order: TSP weights from the bin matrix, and the ordering driver."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .curve_order import CurveLayout, order_curves
from .metrics import crossings
from .setsystem import BinMatrix, append_dummy
from .tsp import ElementOrder, Mode, WeightMatrix, solve_tsp_exact, solve_tsp_heuristic

DEFAULT_ITERATIONS = 5


class Strategy(str, Enum):
    HAMMING = "hamming"
    UPPER_BOUND = "upper-bound"
    ITERATIVE_HAMMING = "iterative-hamming"
    ITERATIVE_UPPER_BOUND = "iterative-upper-bound"
    RANDOM = "random"

    @property
    def iterative(self) -> bool:
        return self in (Strategy.ITERATIVE_HAMMING, Strategy.ITERATIVE_UPPER_BOUND)


class Solver(str, Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic"


def _weights(raw: np.ndarray, mode: Mode) -> WeightMatrix:
    w = np.array(raw, dtype=float)
    np.fill_diagonal(w, 0.0)
    if mode == "path":
        w[-1, :] = 0.0
        w[:, -1] = 0.0
    return WeightMatrix(w, mode)


def _columns(B: BinMatrix, mode: Mode) -> np.ndarray:
    return (append_dummy(B) if mode == "path" else B).bins


def hamming_weights(B: BinMatrix, mode: Mode = "path") -> WeightMatrix:
    """Number of rows in which two columns hold different bins.

    ``B`` is the plain bin matrix; the dummy column is appended here in path
    mode.
    """
    cols = _columns(B, mode)
    equal = np.zeros((cols.shape[1], cols.shape[1]))
    for b in range(1, B.k + 1):
        onehot = (cols == b).astype(float)
        equal += onehot.T @ onehot
    return _weights(B.m - equal, mode)


def upper_bound_weights(B: BinMatrix, mode: Mode = "path") -> WeightMatrix:
    """Inversion estimate between two columns placed next to each other.

    For curves ``x < y`` the directional estimate from column i to column j
    counts the pair when ``b[x,i] <= b[y,i] and b[x,j] > b[y,j]`` or the
    mirrored ``b[x,i] >= b[y,i] and b[x,j] < b[y,j]``. The weight is the
    sum of both directions, so a strict bin inversion counts 2 and a pair
    that ties in exactly one of the two columns counts 1.
    """
    cols = _columns(B, mode)
    iu, ju = np.triu_indices(B.m, 1)
    sign = np.sign(cols[iu] - cols[ju])
    pos = (sign > 0).astype(float)
    neg = (sign < 0).astype(float)
    tie = (sign == 0).astype(float)
    strict = pos.T @ neg + neg.T @ pos
    half = tie.T @ (1 - tie) + (1 - tie).T @ tie
    return _weights(2 * strict + half, mode)


def feedback_weights(layout: CurveLayout, mode: Mode = "path") -> WeightMatrix:
    """Discordant curve pairs between the orders at two elements.

    Indexed by original element id, whatever the slot order of ``layout``.
    """
    pos = layout.by_element()
    if mode == "path":
        pos = np.vstack([pos, np.arange(layout.m)])
    iu, ju = np.triu_indices(layout.m, 1)
    sign = np.sign(pos[:, iu] - pos[:, ju]).astype(float)
    return _weights((len(iu) - sign @ sign.T) / 2, mode)


@dataclass
class OrderingResult:
    order: ElementOrder
    layout: CurveLayout
    crossings: int
    iterations_used: int
    best_iteration: int
    trace: list[int] = field(default_factory=list)
    runtime_ms: float = 0.0


def _solve(W: WeightMatrix, solver: Solver, rng, exact_cap: int | None) -> ElementOrder:
    if solver == Solver.EXACT:
        return solve_tsp_exact(W) if exact_cap is None else solve_tsp_exact(W, max_vertices=exact_cap)
    return solve_tsp_heuristic(W, rng)


def order_elements(
    B: BinMatrix,
    strategy: Strategy | str = Strategy.UPPER_BOUND,
    solver: Solver | str = Solver.EXACT,
    max_iterations: int = DEFAULT_ITERATIONS,
    mode: Mode = "path",
    seed: int = 0,
    exact_cap: int | None = None,
) -> OrderingResult:
    """Order elements, then curves.

    Iterative strategies start from their base weights and then loop
    curve order, feedback weights, TSP, until ``max_iterations`` tours have
    been computed or the crossing count stops going down. The best
    (order, layout) seen is returned; ``trace`` holds the crossing count of
    every iteration.
    """
    strategy = Strategy(strategy)
    solver = Solver(solver)
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    n = B.n

    if strategy == Strategy.RANDOM:
        order = ElementOrder(tuple(rng.permutation(n).tolist()), mode)
    elif n == 1:
        order = ElementOrder((0,), mode)
    else:
        base = hamming_weights if strategy in (Strategy.HAMMING, Strategy.ITERATIVE_HAMMING) else upper_bound_weights
        order = _solve(base(B, mode), solver, rng, exact_cap)

    layout = order_curves(B, order)
    best = (order, layout)
    best_cr = crossings(layout)
    trace = [best_cr]
    best_iteration = 1
    if strategy.iterative and n > 1:
        while len(trace) < max_iterations:
            order = _solve(feedback_weights(layout, mode), solver, rng, exact_cap)
            layout = order_curves(B, order)
            cr = crossings(layout)
            trace.append(cr)
            if cr >= best_cr:
                break
            best, best_cr, best_iteration = (order, layout), cr, len(trace)

    elapsed = (time.perf_counter() - start) * 1000.0
    return OrderingResult(best[0], best[1], best_cr, len(trace), best_iteration, trace, elapsed)
