"""Deterministic SVG 1.1 output for a :class:`~storysets.layout.Scene`.

All styling is inline. Coordinates inside the main group are scene
coordinates times ``scale``; the group's translate only adds margins.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .layout import Scene

STROKE_WIDTH = 2.5
FONT_SIZE = 12
_CHAR_WIDTH = 0.6 * FONT_SIZE
_PAD = 20.0
_SWATCH = 18.0


def fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass(frozen=True)
class SvgDocument:
    width: float
    height: float
    body: str

    def to_string(self) -> str:
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(self.width)}" '
            f'height="{fmt(self.height)}" viewBox="0 0 {fmt(self.width)} {fmt(self.height)}">\n'
            f"{self.body}</svg>\n"
        )

    def write(self, path) -> None:
        Path(path).write_bytes(self.to_string().encode("utf-8"))


def _path_data(commands, scale: float) -> str:
    parts = []
    for cmd in commands:
        op, pts = cmd[0], cmd[1:]
        coords = " ".join(f"{fmt(x * scale)},{fmt(y * scale)}" for x, y in pts)
        parts.append(f"{op}{coords}" if coords else op)
    return " ".join(parts)


def render_svg(scene: Scene, scale: float = 20.0, show_legend: bool = True) -> SvgDocument:
    if scale <= 0:
        raise ValueError("scale must be positive")
    xmin, ymin, xmax, ymax = (v * scale for v in scene.extent)
    longest_label = max((len(g.name) for g in scene.glyphs), default=0)
    label_room = longest_label * _CHAR_WIDTH if scene.layout == "star" else 0.0
    legend_w = 0.0
    if show_legend and scene.curves:
        legend_w = _SWATCH + 8 + max(len(c.name) for c in scene.curves) * _CHAR_WIDTH + _PAD
    tx = _PAD + legend_w + label_room - xmin
    ty = _PAD + (label_room if scene.layout == "star" else 0.0) - ymin
    width = tx + xmax + label_room + _PAD
    height = ty + ymax + FONT_SIZE + _PAD + (label_room if scene.layout == "star" else 0.0)

    lines = [f'<g id="scene" transform="translate({fmt(tx)},{fmt(ty)})">\n']
    for g in scene.glyphs:
        lines.append(f'<g id="glyph-{g.slot}" data-element={quoteattr(g.name)}>\n')
        for b in g.boxes:
            rot = f' transform="rotate({fmt(b.rotate)})"' if b.rotate else ""
            lines.append(
                f'<rect x="{fmt(b.x * scale)}" y="{fmt(b.y * scale)}" width="{fmt(b.width * scale)}" '
                f'height="{fmt(b.height * scale)}" fill="{b.fill}" stroke="#ffffff" stroke-width="0.5"{rot}/>\n'
            )
        lines.append("</g>\n")
    by_index = {c.curve: c for c in scene.curves}
    for s in scene.draw_order:
        c = by_index[s]
        d = _path_data(c.commands, scale)
        if not d:
            continue
        lines.append(
            f'<path id="curve-{c.curve}" d="{d}" fill="none" stroke="{c.color}" '
            f'stroke-width="{fmt(STROKE_WIDTH)}" stroke-linejoin="round" stroke-linecap="round"/>\n'
        )
    for g in scene.glyphs:
        lx, ly = g.label
        dy = FONT_SIZE if scene.layout == "storyline" else FONT_SIZE / 3
        lines.append(
            f'<text x="{fmt(lx * scale)}" y="{fmt(ly * scale + dy)}" font-family="sans-serif" '
            f'font-size="{FONT_SIZE}" text-anchor="{g.label_anchor}">{escape(g.name)}</text>\n'
        )
    lines.append("</g>\n")
    if legend_w:
        lines.append('<g id="legend">\n')
        for row, c in enumerate(scene.curves):
            y = _PAD + row * (FONT_SIZE + 6) + FONT_SIZE / 2
            lines.append(
                f'<line x1="{fmt(_PAD)}" y1="{fmt(y)}" x2="{fmt(_PAD + _SWATCH)}" y2="{fmt(y)}" '
                f'stroke="{c.color}" stroke-width="{fmt(STROKE_WIDTH)}" stroke-linecap="round"/>\n'
            )
            lines.append(
                f'<text x="{fmt(_PAD + _SWATCH + 6)}" y="{fmt(y + FONT_SIZE / 3)}" font-family="sans-serif" '
                f'font-size="{FONT_SIZE}">{escape(c.name)}</text>\n'
            )
        lines.append("</g>\n")
        height = max(height, _PAD * 2 + len(scene.curves) * (FONT_SIZE + 6))
    return SvgDocument(width, height, "".join(lines))
