"""Symmetric TSP over element-similarity weights.

A :class:`WeightMatrix` in ``path`` mode carries one extra vertex (the last
index) standing for the dummy column; a minimum tour through it is a
minimum Hamiltonian path over the real elements. In ``cycle`` mode there is
no dummy and the tour closes on itself (star layout).

Two solvers are provided. :func:`solve_tsp_exact` is optimal; it runs a
Held-Karp subset DP for small graphs and an integer program with lazily
added subtour cuts (HiGHS via :func:`scipy.optimize.milp`) beyond that.
:func:`solve_tsp_heuristic` is nearest neighbour, 2-opt, then seeded
simulated annealing.

Integer-valued weights are tie-broken by a tiny fixed perturbation whose
total over any tour is below 0.5. Both solvers minimise the same perturbed
objective, so when the heuristic finds an optimal tour it is the same tour
the exact solver returns rather than an arbitrary co-optimal one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.sparse as sparse
from scipy.optimize import Bounds, LinearConstraint, milp

Mode = Literal["path", "cycle"]

HELD_KARP_MAX_VERTICES = 20
AUTO_HELD_KARP_VERTICES = 12
DEFAULT_MAX_VERTICES = 128


class CapacityError(RuntimeError):
    """Instance too large for the exact solver."""


@dataclass(frozen=True)
class WeightMatrix:
    w: np.ndarray = field(repr=False)
    mode: Mode = "path"

    def __post_init__(self):
        if self.mode not in ("path", "cycle"):
            raise ValueError(f"mode must be 'path' or 'cycle', got {self.mode!r}")
        w = np.array(self.w, dtype=float, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if not np.allclose(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("weight matrix must have a zero diagonal")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if self.mode == "path" and w.shape[0] and (np.any(w[-1] != 0)):
            raise ValueError("dummy-incident weights must be zero in path mode")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def vertices(self) -> int:
        return self.w.shape[0]

    @property
    def n(self) -> int:
        """Number of real elements (dummy excluded)."""
        return self.vertices - 1 if self.mode == "path" else self.vertices


@dataclass(frozen=True)
class ElementOrder:
    """Element permutation; ``pi[p]`` is the element shown at position ``p``."""

    pi: tuple[int, ...]
    mode: Mode = "path"

    def __post_init__(self):
        pi = tuple(int(e) for e in self.pi)
        if sorted(pi) != list(range(len(pi))):
            raise ValueError(f"not a permutation: {pi}")
        object.__setattr__(self, "pi", pi)

    def __len__(self):
        return len(self.pi)

    def reversed(self) -> "ElementOrder":
        return ElementOrder(self.pi[::-1], self.mode)


def tour_cost(W: WeightMatrix, order: ElementOrder) -> float:
    """Cost of ``order`` under ``W`` (closing edge included in cycle mode)."""
    pi = order.pi
    w = W.w
    cost = sum(w[a, b] for a, b in zip(pi, pi[1:]))
    if W.mode == "cycle" and len(pi) > 2:
        cost += w[pi[-1], pi[0]]
    return float(cost)


def _cycle_cost(d, tour) -> float:
    return float(sum(d[tour[i - 1]][tour[i]] for i in range(len(tour))))


def _tie_break(w: np.ndarray) -> np.ndarray:
    V = w.shape[0]
    if V < 4 or not np.array_equal(w, np.round(w)):
        return w
    rng = np.random.default_rng(0x5EED + V)
    noise = np.triu(rng.random((V, V)), 1)
    noise = noise + noise.T
    # Any tour has V edges, so the total perturbation stays below 0.5.
    return w + noise * (0.5 / V)


def _to_order(W: WeightMatrix, tour) -> ElementOrder:
    """Cut a vertex cycle into an ElementOrder with canonical orientation."""
    tour = [int(v) for v in tour]
    V = len(tour)
    if W.mode == "path":
        dummy = V - 1
        at = tour.index(dummy)
        pi = tour[at + 1:] + tour[:at]
        if len(pi) > 1 and pi[0] > pi[-1]:
            pi.reverse()
    else:
        at = tour.index(0)
        pi = tour[at:] + tour[:at]
        if len(pi) > 2 and pi[1] > pi[-1]:
            pi = [pi[0]] + pi[1:][::-1]
    return ElementOrder(tuple(pi), W.mode)


def _held_karp(d: np.ndarray) -> list[int]:
    V = d.shape[0]
    rest = V - 1
    full = 1 << rest
    dp = np.full((full, rest), np.inf)
    parent = np.full((full, rest), -1, dtype=np.int64)
    for j in range(rest):
        dp[1 << j, j] = d[0, j + 1]
    inner = d[1:, 1:]
    bits = 1 << np.arange(rest)
    for mask in range(1, full):
        if mask & (mask - 1) == 0:
            continue
        js = np.nonzero(mask & bits)[0]
        # cand[a, b]: arrive at js[b] from js[a]
        prev = dp[mask ^ bits[js]]  # rows indexed by target b
        cand = prev[:, js].T + inner[np.ix_(js, js)]
        np.fill_diagonal(cand, np.inf)
        best = np.argmin(cand, axis=0)
        dp[mask, js] = cand[best, np.arange(len(js))]
        parent[mask, js] = js[best]
    last = dp[full - 1] + d[1:, 0]
    j = int(np.argmin(last))
    mask = full - 1
    path = []
    while j >= 0:
        path.append(j + 1)
        prev_j = int(parent[mask, j])
        mask ^= 1 << j
        j = prev_j
    return [0] + path[::-1]


def _components(adj: list[list[int]]) -> list[list[int]]:
    seen = [False] * len(adj)
    comps = []
    for start in range(len(adj)):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _ilp(d: np.ndarray) -> list[int]:
    V = d.shape[0]
    iu, ju = np.triu_indices(V, 1)
    E = len(iu)
    cols = np.arange(E)
    degree = sparse.csr_matrix(
        (np.ones(2 * E), (np.concatenate([iu, ju]), np.concatenate([cols, cols]))),
        shape=(V, E),
    )
    constraints = [LinearConstraint(degree, 2, 2)]
    options = {"mip_rel_gap": 0.0, "disp": False}
    while True:
        res = milp(
            d[iu, ju],
            constraints=constraints,
            integrality=np.ones(E),
            bounds=Bounds(0, 1),
            options=options,
        )
        if res.x is None:
            raise RuntimeError(f"MILP solver failed: {res.message}")
        chosen = np.nonzero(res.x > 0.5)[0]
        adj: list[list[int]] = [[] for _ in range(V)]
        for e in chosen:
            adj[iu[e]].append(int(ju[e]))
            adj[ju[e]].append(int(iu[e]))
        comps = _components(adj)
        if len(comps) == 1:
            break
        for comp in comps:
            inside = np.zeros(V, dtype=bool)
            inside[comp] = True
            row = (inside[iu] & inside[ju]).astype(float)
            constraints.append(LinearConstraint(row[None, :], -np.inf, len(comp) - 1))
    tour, prev, cur = [0], -1, 0
    while len(tour) < V:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        tour.append(nxt)
        prev, cur = cur, nxt
    return tour


def solve_tsp_exact(
    W: WeightMatrix,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    method: Literal["auto", "held_karp", "ilp"] = "auto",
) -> ElementOrder:
    """Minimum-weight tour (cycle mode) or Hamiltonian path (path mode).

    Raises :class:`CapacityError` when the graph has more than
    ``max_vertices`` vertices, or more than 20 with ``method="held_karp"``.
    """
    V = W.vertices
    if V > max_vertices:
        raise CapacityError(
            f"exact TSP capped at {max_vertices} vertices, instance has {V}; "
            "use the heuristic solver instead"
        )
    if method == "held_karp" and V > HELD_KARP_MAX_VERTICES:
        raise CapacityError(
            f"Held-Karp is capped at {HELD_KARP_MAX_VERTICES} vertices, instance has {V}; "
            "use the heuristic solver or the ILP method"
        )
    if V <= 3:
        return _to_order(W, list(range(V)))
    d = _tie_break(W.w)
    if method == "held_karp" or (method == "auto" and V <= AUTO_HELD_KARP_VERTICES):
        tour = _held_karp(d)
    elif method in ("auto", "ilp"):
        tour = _ilp(d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _to_order(W, tour)


def _nearest_neighbor(d, start: int = 0) -> list[int]:
    V = len(d)
    unvisited = set(range(V))
    unvisited.remove(start)
    tour = [start]
    while unvisited:
        row = d[tour[-1]]
        nxt = min(unvisited, key=lambda v: (row[v], v))
        tour.append(nxt)
        unvisited.remove(nxt)
    return tour


def _two_opt(d: np.ndarray, tour: list[int]) -> list[int]:
    """First-improvement 2-opt to a local optimum."""
    t = np.array(tour)
    V = len(t)
    improved = True
    while improved:
        improved = False
        for i in range(V - 2):
            a, b = t[i], t[i + 1]
            js = np.arange(i + 2, V if i > 0 else V - 1)
            if not len(js):
                continue
            c = t[js]
            dd = t[(js + 1) % V]
            delta = d[a, c] + d[b, dd] - d[a, b] - d[c, dd]
            best = int(np.argmin(delta))
            if delta[best] < -1e-12:
                j = js[best]
                t[i + 1:j + 1] = t[i + 1:j + 1][::-1]
                improved = True
    return t.tolist()


def _anneal(d: list[list[float]], tour: list[int], rng: np.random.Generator, steps: int):
    V = len(tour)
    cur = list(tour)
    cost = _cycle_cost(d, cur)
    best, best_cost = list(cur), cost
    pairs = rng.integers(0, V, size=(steps, 2))
    # Initial temperature from the mean uphill move on the starting tour.
    uphill = []
    for i, j in pairs[: min(steps, 200)]:
        i, j = (i, j) if i < j else (j, i)
        if j - i < 1 or (i == 0 and j == V - 1):
            continue
        a, b, c, e = cur[i - 1], cur[i], cur[j], cur[(j + 1) % V]
        delta = d[a][c] + d[b][e] - d[a][b] - d[c][e]
        if delta > 0:
            uphill.append(delta)
    t0 = float(np.mean(uphill)) if uphill else 1.0
    t_end = t0 * 1e-3
    decay = (t_end / t0) ** (1.0 / max(steps - 1, 1))
    accept = rng.random(steps)
    temp = t0
    for step in range(steps):
        i, j = pairs[step]
        if i > j:
            i, j = j, i
        if j - i >= 1 and not (i == 0 and j == V - 1):
            a, b, c, e = cur[i - 1], cur[i], cur[j], cur[(j + 1) % V]
            delta = d[a][c] + d[b][e] - d[a][b] - d[c][e]
            if delta <= 0 or accept[step] < math.exp(-delta / temp):
                cur[i:j + 1] = cur[i:j + 1][::-1]
                cost += delta
                if cost < best_cost - 1e-12:
                    best, best_cost = list(cur), cost
        temp *= decay
    return best


def solve_tsp_heuristic(W: WeightMatrix, seed=0, steps: int | None = None) -> ElementOrder:
    """Nearest neighbour, then 2-opt, then simulated annealing, then 2-opt.

    ``seed`` is an int or a :class:`numpy.random.Generator`. The returned
    tour never costs more than the nearest-neighbour construction.
    """
    V = W.vertices
    if V <= 3:
        return _to_order(W, list(range(V)))
    rng = np.random.default_rng(seed)
    d = _tie_break(W.w)
    dl = d.tolist()
    tour = _two_opt(d, _nearest_neighbor(dl))
    if steps is None:
        steps = min(max(200 * V, 2000), 20000)
    best = tour
    best_cost = _cycle_cost(dl, tour)
    # Small graphs are cheap, so restart the annealer a few times.
    for _ in range(4 if V <= 12 else 1):
        cand = _two_opt(d, _anneal(dl, tour, rng, steps))
        cand_cost = _cycle_cost(dl, cand)
        if cand_cost < best_cost - 1e-12:
            best, best_cost = cand, cand_cost
    return _to_order(W, best)
