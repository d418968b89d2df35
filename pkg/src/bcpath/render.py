"""SVG 1.1 drawings of cs paths with exact line and arc primitives."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from xml.sax.saxutils import quoteattr

from . import geometry as g
from .cspath import CsPath, advance, component_starts

SVG_NS = "http://www.w3.org/2000/svg"


@dataclass(frozen=True)
class RenderSpec:
    width_px: int = 800
    height_px: int = 600
    show_adjacent_circles: bool = False
    show_region: bool = False
    stroke_scale: float = 1.0

    def __post_init__(self):
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("image dimensions must be positive")
        if not self.stroke_scale > 0:
            raise ValueError("stroke scale must be positive")


def _extent(p: CsPath, spec: RenderSpec) -> tuple[float, float, float, float]:
    pts = [p.start.position]
    for c, comp in zip(component_starts(p), p.components):
        n = max(2, int(math.ceil(comp.length / 0.05)))
        pts += [advance(c, comp.sense, comp.length * k / n).position for k in range(1, n + 1)]
    if spec.show_adjacent_circles:
        for c, comp in zip(component_starts(p), p.components):
            if comp.is_arc:
                cx, cy = g.adjacent_circle(c, comp.sense).center
                pts += [(cx - 1, cy - 1), (cx + 1, cy + 1)]
    if spec.show_region:
        x, y = p.start.position
        pts += [(x - 2, y - 2), (x + 2, y + 2)]
    xs, ys = [q[0] for q in pts], [q[1] for q in pts]
    return min(xs), min(ys), max(xs), max(ys)


class _Frame:
    """World to pixel map: uniform scale, y axis pointing up in the world."""

    def __init__(self, box, spec: RenderSpec, pad: float = 20.0):
        x0, y0, x1, y1 = box
        w = max(x1 - x0, 1e-9)
        h = max(y1 - y0, 1e-9)
        self.k = min((spec.width_px - 2 * pad) / w, (spec.height_px - 2 * pad) / h)
        # centre the drawing
        self.ox = pad + 0.5 * (spec.width_px - 2 * pad - self.k * w) - self.k * x0
        self.oy = pad + 0.5 * (spec.height_px - 2 * pad - self.k * h) + self.k * y1

    def __call__(self, q: g.Point) -> str:
        return f"{self.ox + self.k * q[0]:.4f} {self.oy - self.k * q[1]:.4f}"


def _path_d(p: CsPath, f: _Frame) -> str:
    parts = [f"M {f(p.start.position)}"]
    r = f"{f.k:.4f}"
    for c, comp in zip(component_starts(p), p.components):
        if comp.length == 0.0:
            continue
        if comp.sense == "S":
            parts.append(f"L {f(advance(c, 'S', comp.length).position)}")
            continue
        # screen y points down, so a left turn is drawn counterclockwise (sweep 0);
        # halves keep every arc below pi and away from the full-circle ambiguity
        sweep = 0 if comp.sense == "L" else 1
        half = advance(c, comp.sense, 0.5 * comp.length)
        end = advance(c, comp.sense, comp.length)
        parts.append(f"A {r} {r} 0 0 {sweep} {f(half.position)}")
        parts.append(f"A {r} {r} 0 0 {sweep} {f(end.position)}")
    return " ".join(parts)


def _circle_d(center: g.Point, f: _Frame) -> str:
    r = f"{f.k:.4f}"
    a = (center[0] + 1.0, center[1])
    b = (center[0] - 1.0, center[1])
    return f"M {f(a)} A {r} {r} 0 1 0 {f(b)} A {r} {r} 0 1 0 {f(a)} Z"


def render_svg(p: CsPath, spec: RenderSpec = RenderSpec()) -> str:
    f = _Frame(_extent(p, spec), spec)
    sw = 2.0 * spec.stroke_scale
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{spec.width_px}" height="{spec.height_px}" '
        f'viewBox="0 0 {spec.width_px} {spec.height_px}">',
    ]
    if spec.show_region:
        z = p.start
        left, right = g.adjacent_circles(z)
        out.append(f'<defs><clipPath id="unit-disk"><path d="{_circle_d(z.position, f)}"/></clipPath></defs>')
        d = " ".join(_circle_d(c, f) for c in (z.position, left.center, right.center))
        out.append(f'<path class="region" d="{d}" fill="#9ecae1" fill-opacity="0.5" '
                   f'fill-rule="evenodd" clip-path="url(#unit-disk)" stroke="none"/>')
    if spec.show_adjacent_circles:
        for c, comp in zip(component_starts(p), p.components):
            if comp.is_arc and comp.length > 0.0:
                cx, cy = f(g.adjacent_circle(c, comp.sense).center).split()
                out.append(f'<circle cx="{cx}" cy="{cy}" r="{f.k:.4f}" fill="none" stroke="#888888" '
                           f'stroke-width="{0.5 * sw:.3f}" stroke-dasharray="6 4"/>')
    if p.components:
        out.append(f'<path class="cs-path" d="{_path_d(p, f)}" fill="none" stroke="#d62728" '
                   f'stroke-width="{sw:.3f}" data-word={quoteattr(p.word)}/>')
    # start marker: a small arrowhead along the initial heading
    h = p.start.heading
    n = g.left_normal(h)
    s = 12.0 * spec.stroke_scale / f.k
    tip = g.add(p.start.position, g.scale(h, s))
    bl = g.sub(g.add(p.start.position, g.scale(n, 0.5 * s)), g.scale(h, 0.3 * s))
    br = g.sub(g.sub(p.start.position, g.scale(n, 0.5 * s)), g.scale(h, 0.3 * s))
    pts = " ".join(",".join(f(q).split()) for q in (tip, bl, br))
    out.append(f'<polygon class="start" points="{pts}" fill="#1f77b4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_stages(paths: list[tuple[str, CsPath]], directory: str,
                 spec: RenderSpec = RenderSpec()) -> list[str]:
    """One SVG per (label, path), named so that lexicographic order is step order."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for i, (label, p) in enumerate(paths, start=1):
        name = os.path.join(directory, f"step_{i:04d}_{label}.svg")
        with open(name, "w", encoding="utf-8") as fh:
            fh.write(render_svg(p, spec))
        names.append(name)
    return names
