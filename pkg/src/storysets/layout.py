"""Geometry for storyline and star layouts.

Coordinates are abstract units with y growing downward, as in SVG. In the
storyline layout glyphs hang from the baseline ``y = 0``: bin 1 (not a
member) is the top box and bin ``k`` the bottom one. A curve's vertical
slot inside its box follows its position in the curve layout, so lower
positions sit nearer the bin-1 end and the drawn order of curves at every
glyph equals the combinatorial order.

The star layout maps the storyline frame onto polar coordinates: slot ``p``
sits at angle ``360 * p / n`` degrees and depth ``y`` becomes the distance
from the inner circle, so lower certainty is nearer the centre.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from .curve_order import CurveLayout
from .setsystem import BinMatrix

TABLEAU10 = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

# viridis sampled at 0, 1/8, ..., 1
CERTAINTY_RAMP = (
    "#440154", "#472d7b", "#3b528b", "#2c728e", "#21918c",
    "#28ae80", "#5ec962", "#addc30", "#fde725",
)
# bin 1 takes the light end of the ramp, bin k this far toward the dark end
_RAMP_DARKEST = 0.15

Point = tuple[float, float]


@dataclass(frozen=True)
class LayoutConfig:
    layout: Literal["storyline", "star"] = "storyline"
    glyph_style: Literal["stacked_width", "colored_uniform"] = "stacked_width"
    bin_heights: Literal["uniform", "local_count", "given_distribution"] = "uniform"
    curve_style: Literal["polyline", "rounded"] = "polyline"
    compact: bool = False
    inner_radius: float = 0.3
    element_gap: float = 4.0
    box_min_width: float = 0.4
    box_max_width: float = 1.2
    curve_gap: float = 0.5
    color_seed: int = 0

    def __post_init__(self):
        choices = {
            "layout": ("storyline", "star"),
            "glyph_style": ("stacked_width", "colored_uniform"),
            "bin_heights": ("uniform", "local_count", "given_distribution"),
            "curve_style": ("polyline", "rounded"),
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        if not 0.0 <= self.inner_radius < 1.0:
            raise ValueError("inner_radius must lie in [0, 1)")
        if self.box_min_width > self.box_max_width:
            raise ValueError("box_min_width must not exceed box_max_width")
        if min(self.element_gap, self.curve_gap, self.box_max_width) <= 0:
            raise ValueError("gaps and box_max_width must be positive")
        if self.box_min_width < 0:
            raise ValueError("box_min_width must be nonnegative")


@dataclass(frozen=True)
class Box:
    element: int
    bin: int
    x: float
    y: float
    width: float
    height: float
    fill: str
    rotate: float = 0.0


@dataclass(frozen=True)
class Glyph:
    element: int
    slot: int
    name: str
    boxes: tuple[Box, ...]
    label: Point
    label_anchor: str = "middle"
    angle: float = 0.0


@dataclass(frozen=True)
class Curve:
    curve: int
    name: str
    color: str
    # (slot, x, y) per element the curve passes; storyline frame until star_transform
    anchors: tuple[tuple[int, float, float], ...]
    points: tuple[Point, ...]
    closed: bool = False
    style: str = "polyline"
    fillet: float = 0.0

    @property
    def commands(self) -> list[tuple]:
        return path_commands(self.points, self.closed, self.style, self.fillet)


@dataclass(frozen=True)
class Scene:
    layout: str
    glyphs: tuple[Glyph, ...]
    curves: tuple[Curve, ...]
    palette: tuple[str, ...]
    certainty_colors: tuple[str, ...]
    extent: tuple[float, float, float, float]
    draw_order: tuple[int, ...]
    pass_half: float = 0.0
    element_gap: float = 1.0
    n: int = 0

    def to_json(self) -> str:
        data = asdict(self)
        data["colors"] = data.pop("palette")
        return json.dumps(data, sort_keys=True)


def assign_colors(m: int, k: int, seed: int = 0) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Set strokes from Tableau10 (seeded order, repeating after 10) and k certainty fills."""
    perm = np.random.default_rng(seed).permutation(len(TABLEAU10))
    palette = tuple(TABLEAU10[perm[i % len(TABLEAU10)]] for i in range(m))
    stops = np.linspace(1.0, _RAMP_DARKEST, k)
    return palette, tuple(_ramp(t) for t in stops)


def _ramp(t: float) -> str:
    rgb = [tuple(int(c[i:i + 2], 16) for i in (1, 3, 5)) for c in CERTAINTY_RAMP]
    pos = t * (len(rgb) - 1)
    lo = min(int(math.floor(pos)), len(rgb) - 2)
    frac = pos - lo
    mixed = [round(a + (b - a) * frac) for a, b in zip(rgb[lo], rgb[lo + 1])]
    return "#" + "".join(f"{v:02x}" for v in mixed)


def box_widths(k: int, config: LayoutConfig) -> list[float]:
    """Width per bin. Stacked glyphs grow with certainty; bin 1 is empty."""
    if config.glyph_style == "colored_uniform":
        return [config.box_max_width] * k
    if k == 2:
        return [0.0, config.box_max_width]
    span = config.box_max_width - config.box_min_width
    return [0.0] + [config.box_min_width + span * (p - 2) / (k - 2) for p in range(2, k + 1)]


def box_heights(counts: np.ndarray, config: LayoutConfig, distribution=None) -> np.ndarray:
    """Box heights per slot and bin.

    ``counts[p, b]`` is the number of curves in bin ``b + 1`` at slot ``p``.
    ``distribution`` rows must already be in slot order.
    """
    gap = config.curve_gap
    n, k = counts.shape
    if config.bin_heights == "uniform":
        return np.full((n, k), max(1, int(counts.max(initial=0))) * gap)
    if config.bin_heights == "local_count":
        return np.maximum(counts, 1) * gap
    if distribution is None:
        raise ValueError("bin_heights='given_distribution' needs a distribution")
    dist = np.asarray(distribution, dtype=float)
    if dist.shape != (n, k):
        raise ValueError(f"distribution has shape {dist.shape}, expected {(n, k)}")
    if np.any(dist < 0) or not np.all(np.isfinite(dist)):
        raise ValueError("distribution weights must be finite and nonnegative")
    totals = dist.sum(axis=1)
    if np.any(totals == 0):
        raise ValueError(f"all-zero distribution for element slot {int(np.argmin(totals))}")
    frac = dist / totals[:, None]
    # one glyph height for all elements, just tall enough for every box's curves
    needed = np.where(frac > 0, counts * gap / np.where(frac > 0, frac, 1.0), 0.0)
    total = max(k * gap, float(needed.max(initial=0.0)))
    # a zero-weight box still has to hold the curves that pass through it
    return np.maximum(frac * total, counts * gap)


def glyph_geometry(
    B: BinMatrix,
    layout: CurveLayout,
    config: LayoutConfig,
    element_names: Sequence[str],
    distribution=None,
    certainty_colors: Sequence[str] = (),
) -> list[Glyph]:
    """Stacked boxes per element in the storyline frame.

    ``distribution`` is indexed by original element id (n x k).
    """
    pi = list(layout.order.pi)
    k = B.k
    cols = B.bins[:, pi]
    counts = np.zeros((len(pi), k), dtype=np.int64)
    for p in range(len(pi)):
        counts[p] = np.bincount(cols[:, p] - 1, minlength=k)[:k] if B.m else 0
    dist = None if distribution is None else np.asarray(distribution, dtype=float)[pi]
    heights = box_heights(counts, config, dist)
    widths = box_widths(k, config)
    fills = list(certainty_colors) or list(assign_colors(0, k)[1])
    label_y = float(heights.sum(axis=1).max(initial=0.0)) + 2 * config.curve_gap
    glyphs = []
    for p, e in enumerate(pi):
        x = p * config.element_gap
        top = 0.0
        boxes = []
        for b in range(k):
            h = float(heights[p, b])
            boxes.append(Box(e, b + 1, x - widths[b] / 2, top, widths[b], h, fills[b]))
            top += h
        glyphs.append(Glyph(e, p, element_names[e], tuple(boxes), (x, label_y)))
    return glyphs


def _anchors(B: BinMatrix, layout: CurveLayout, glyphs: Sequence[Glyph]) -> list[list[tuple[int, float, float]]]:
    pi = list(layout.order.pi)
    out: list[list] = [[] for _ in range(B.m)]
    for p, glyph in enumerate(glyphs):
        col = B.bins[:, pi[p]]
        for b, members in enumerate(_by_bin(col, layout.positions[p], B.k)):
            box = glyph.boxes[b]
            c = len(members)
            for t, s in enumerate(members):
                out[s].append((p, box.x + box.width / 2, box.y + box.height * (t + 0.5) / c))
    return out


def _by_bin(col: np.ndarray, positions: np.ndarray, k: int) -> list[list[int]]:
    """Curves per bin, ordered by layout position (lowest first)."""
    groups: list[list[int]] = [[] for _ in range(k)]
    for s in np.argsort(positions, kind="stable"):
        groups[col[s] - 1].append(int(s))
    return groups


def _storyline_points(anchors, pass_half: float, lead: float) -> tuple[Point, ...]:
    if not anchors:
        return ()
    pts: list[Point] = [(anchors[0][1] - lead, anchors[0][2])]
    for _, x, y in anchors:
        pts.append((x - pass_half, y))
        pts.append((x + pass_half, y))
    pts.append((anchors[-1][1] + lead, anchors[-1][2]))
    return tuple(pts)


def _fillet_radius(config: LayoutConfig) -> float:
    return min(config.element_gap / 4, config.curve_gap / 2)


def curve_paths(
    B: BinMatrix,
    layout: CurveLayout,
    glyphs: Sequence[Glyph],
    config: LayoutConfig,
    set_names: Sequence[str],
    palette: Sequence[str],
) -> list[Curve]:
    """One path per set through its anchors in the storyline frame.

    Each curve runs horizontally through every glyph it meets and straight
    between glyphs; ``rounded`` style fillets the bends.
    """
    pass_half = config.box_max_width / 2
    lead = config.element_gap / 2
    curves = []
    for s, anchors in enumerate(_anchors(B, layout, glyphs)):
        curves.append(
            Curve(
                s,
                set_names[s],
                palette[s],
                tuple(anchors),
                _storyline_points(anchors, pass_half, lead),
                False,
                config.curve_style,
                _fillet_radius(config),
            )
        )
    return curves


def trim_curves(scene: Scene, B: BinMatrix, order) -> Scene:
    """Cut every curve to the span between its first and last member element."""
    if scene.layout != "storyline":
        raise ValueError("compact curves are only defined for the storyline layout")
    cols = B.bins[:, list(order.pi)]
    lead = scene.element_gap / 2
    curves = []
    for c in scene.curves:
        member = np.nonzero(cols[c.curve] > 1)[0]
        if not len(member):
            anchors = ()
        else:
            lo, hi = int(member[0]), int(member[-1])
            anchors = tuple(a for a in c.anchors if lo <= a[0] <= hi)
        curves.append(replace(c, anchors=anchors, points=_storyline_points(anchors, scene.pass_half, lead)))
    return replace(scene, curves=tuple(curves))


def star_transform(scene: Scene, config: LayoutConfig) -> Scene:
    """Wrap a storyline scene around a circle."""
    n = scene.n
    if n < 2:
        raise ValueError("the star layout needs at least two elements")
    depth = max((sum(b.height for b in g.boxes) for g in scene.glyphs), default=0.0)
    r_in = config.inner_radius * depth / (1.0 - config.inner_radius)
    turn = 2 * math.pi / (n * scene.element_gap)

    def polar(x: float, y: float) -> Point:
        theta = x * turn
        r = r_in + y
        return (r * math.cos(theta), r * math.sin(theta))

    glyphs = []
    for g in scene.glyphs:
        theta = g.slot * scene.element_gap * turn
        deg = math.degrees(theta)
        boxes = tuple(
            replace(b, x=r_in + b.y, y=-b.width / 2, width=b.height, height=b.width, rotate=deg) for b in g.boxes
        )
        r_label = r_in + depth + 2 * config.curve_gap
        cos = math.cos(theta)
        anchor = "middle" if abs(cos) < 1e-9 else ("start" if cos > 0 else "end")
        glyphs.append(
            replace(g, boxes=boxes, label=(r_label * cos, r_label * math.sin(theta)), label_anchor=anchor, angle=deg)
        )

    curves = []
    for c in scene.curves:
        pts = []
        for _, x, y in c.anchors:
            pts.append(polar(x - scene.pass_half, y))
            pts.append(polar(x + scene.pass_half, y))
        anchors = tuple((p, *polar(x, y)) for p, x, y in c.anchors)
        curves.append(replace(c, anchors=anchors, points=tuple(pts), closed=True))

    r_out = r_in + depth + 2 * config.curve_gap
    return replace(
        scene,
        layout="star",
        glyphs=tuple(glyphs),
        curves=tuple(curves),
        extent=(-r_out, -r_out, r_out, r_out),
    )


def build_scene(
    B: BinMatrix,
    layout: CurveLayout,
    config: LayoutConfig = LayoutConfig(),
    element_names: Sequence[str] | None = None,
    set_names: Sequence[str] | None = None,
    distribution=None,
) -> Scene:
    if element_names is None:
        element_names = [f"e{j + 1}" for j in range(B.n)]
    if set_names is None:
        set_names = [f"s{i + 1}" for i in range(B.m)]
    palette, fills = assign_colors(B.m, B.k, config.color_seed)
    glyphs = glyph_geometry(B, layout, config, element_names, distribution, fills)
    curves = curve_paths(B, layout, glyphs, config, set_names, palette)
    n = len(layout.order)
    height = max((sum(b.height for b in g.boxes) for g in glyphs), default=0.0)
    half = config.element_gap / 2
    first = layout.positions[0] if n else np.zeros(0)
    scene = Scene(
        layout="storyline",
        glyphs=tuple(glyphs),
        curves=tuple(curves),
        palette=tuple(palette),
        certainty_colors=tuple(fills),
        extent=(-half, 0.0, (n - 1) * config.element_gap + half, height + 2 * config.curve_gap),
        draw_order=tuple(int(s) for s in np.argsort(first, kind="stable")),
        pass_half=config.box_max_width / 2,
        element_gap=config.element_gap,
        n=n,
    )
    if config.layout == "star":
        return star_transform(scene, config)
    if config.compact:
        return trim_curves(scene, B, layout.order)
    return scene


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def _simplify(points: Sequence[Point], closed: bool) -> list[Point]:
    """Drop repeated points and interior points on a straight run."""
    pts: list[Point] = []
    for p in points:
        if not pts or math.dist(p, pts[-1]) > 1e-12:
            pts.append(p)
    if closed and len(pts) > 1 and math.dist(pts[0], pts[-1]) <= 1e-12:
        pts.pop()
    changed = True
    while changed and len(pts) > 2:
        changed = False
        out = []
        N = len(pts)
        for i, p in enumerate(pts):
            if not closed and (i == 0 or i == N - 1):
                out.append(p)
                continue
            a, c = pts[i - 1], pts[(i + 1) % N]
            u, v = _sub(p, a), _sub(c, p)
            cross = u[0] * v[1] - u[1] * v[0]
            dot = u[0] * v[0] + u[1] * v[1]
            if abs(cross) <= 1e-9 * (math.hypot(*u) * math.hypot(*v)) and dot > 0:
                changed = True
                continue
            out.append(p)
        pts = out
    return pts


def path_commands(points: Sequence[Point], closed: bool, style: str, radius: float) -> list[tuple]:
    """Path as ``("M", p)``, ``("L", p)``, ``("Q", ctrl, p)`` and ``("Z",)`` commands.

    Rounded paths replace each bend by a quadratic fillet that starts and
    ends on the two adjoining segments, at most ``radius`` from the corner
    and never past the middle of either segment.
    """
    pts = _simplify(points, closed)
    if not pts:
        return []
    if len(pts) == 1:
        return [("M", pts[0])]
    if style != "rounded" or len(pts) < 3 and not closed:
        cmds = [("M", pts[0])] + [("L", p) for p in pts[1:]]
        return cmds + [("Z",)] if closed else cmds

    N = len(pts)
    corners = range(N) if closed else range(1, N - 1)
    fillets = {}
    for i in corners:
        a, v, c = pts[i - 1], pts[i], pts[(i + 1) % N]
        la, lc = math.dist(a, v), math.dist(v, c)
        r = min(radius, la / 2, lc / 2)
        p0 = (v[0] + (a[0] - v[0]) * r / la, v[1] + (a[1] - v[1]) * r / la)
        p2 = (v[0] + (c[0] - v[0]) * r / lc, v[1] + (c[1] - v[1]) * r / lc)
        fillets[i] = (p0, v, p2)
    if closed:
        cmds = [("M", fillets[0][2])]
        for i in list(range(1, N)) + [0]:
            p0, v, p2 = fillets[i]
            cmds += [("L", p0), ("Q", v, p2)]
        return cmds + [("Z",)]
    cmds = [("M", pts[0])]
    for i in range(1, N - 1):
        p0, v, p2 = fillets[i]
        cmds += [("L", p0), ("Q", v, p2)]
    return cmds + [("L", pts[-1])]
