"""Generators of random paths and curves shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

from bcpath.cspath import CsComponent, CsPath, SampledPath
from bcpath.geometry import TWO_PI, Config


def random_config(rng: np.random.Generator, half_width: float = 5.0) -> Config:
    return Config(rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width),
                  rng.uniform(0.0, TWO_PI))


def random_cs_path(rng: np.random.Generator, n: int, max_seg: float = 2.0) -> CsPath:
    """Canonical cs path with exactly n positive components."""
    comps = []
    while len(comps) < n:
        s = "LSR"[rng.integers(3)]
        if comps and comps[-1].sense == s:
            continue
        ell = rng.uniform(0.05, max_seg) if s == "S" else rng.uniform(0.05, TWO_PI - 0.05)
        comps.append(CsComponent(s, ell))
    return CsPath(random_config(rng, 3.0), tuple(comps))


def pose_on_piece(c: Config, k: float, s: np.ndarray):
    """Closed-form poses after arclength s at constant curvature k."""
    th = c.theta + k * s
    if abs(k) < 1e-12:
        return c.x + s * math.cos(c.theta), c.y + s * math.sin(c.theta), th
    return (c.x + (np.sin(th) - math.sin(c.theta)) / k,
            c.y - (np.cos(th) - math.cos(c.theta)) / k, th)


def piecewise_curvature_path(start: Config, pieces, step: float) -> SampledPath:
    """Exact samples of a path made of (curvature, length) pieces."""
    total = math.fsum(l for _, l in pieces)
    n = max(1, int(math.ceil(total / step - 1e-9)))
    s = np.linspace(0.0, total, n + 1)
    xs, ys, ts = np.empty_like(s), np.empty_like(s), np.empty_like(s)
    c = start
    s0 = 0.0
    for i, (k, ell) in enumerate(pieces):
        last = i == len(pieces) - 1
        sel = (s >= s0) if last else ((s >= s0) & (s < s0 + ell))
        x, y, t = pose_on_piece(c, k, s[sel] - s0)
        xs[sel], ys[sel], ts[sel] = x, y, t
        ex, ey, et = pose_on_piece(c, k, np.array([ell]))
        c = Config(float(ex[0]), float(ey[0]), float(et[0]))
        s0 += ell
    return SampledPath(s, xs, ys, ts)


def smooth_curvature_path(start: Config, total: float, step: float, amp: float, omega: float,
                          phase: float, refine: int = 16) -> SampledPath:
    """Samples of a path with curvature amp*sin(omega*s + phase), |amp| <= 1.

    Heading is exact; positions come from trapezoid integration on a grid
    ``refine`` times finer than the output spacing.
    """
    n = max(1, int(math.ceil(total / step - 1e-9)))
    fine = np.linspace(0.0, total, n * refine + 1)
    th = start.theta + amp / omega * (math.cos(phase) - np.cos(omega * fine + phase))
    dx = np.cos(th)
    dy = np.sin(th)
    h = fine[1] - fine[0]
    x = start.x + np.concatenate([[0.0], np.cumsum(0.5 * h * (dx[1:] + dx[:-1]))])
    y = start.y + np.concatenate([[0.0], np.cumsum(0.5 * h * (dy[1:] + dy[:-1]))])
    return SampledPath(fine[::refine], x[::refine], y[::refine], th[::refine])


def random_pieces(rng: np.random.Generator, total: float, count: int, max_k: float = 1.0):
    cuts = np.sort(rng.uniform(0.0, total, count - 1))
    lengths = np.diff(np.concatenate([[0.0], cuts, [total]]))
    return [(float(rng.uniform(-max_k, max_k)), float(l)) for l in lengths if l > 0]


def csc_pieces(rng: np.random.Generator, total: float):
    """A fragment that is itself a CSC path with arcs on unit circles."""
    first, seg, last = rng.dirichlet([1.0, 1.0, 1.0]) * total
    k1 = float(rng.choice([-1.0, 1.0]))
    k2 = float(rng.choice([-1.0, 1.0]))
    return [(k1, float(first)), (0.0, float(seg)), (k2, float(last))]
