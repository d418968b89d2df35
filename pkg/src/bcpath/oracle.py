"""Independent ground truth for the analytic solver and the length lemmas.

``lattice_shortest`` is a uniform-cost search over bang-bang controls
(curvature -1, 0, +1) with headings on a fixed lattice. Costs are whole
micro-steps, so the priority queue is a dict of integer buckets. Poses are
de-duplicated on a grid three times as fine as the goal cell: the first pose
to enter a fine cell with a given heading represents it from then on.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cspath import SampledPath
from .geometry import TWO_PI, Config


# de-duplication cells per goal cell along each axis
SPLIT = 3
# heading lattice steps per heading bin; a turn move advances one such step
TURN_REFINE = 2


class Unreachable(RuntimeError):
    pass


class RadiusViolation(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    position_step: float = 0.05
    heading_bins: int = 72
    control_step: float = 0.02
    # (xmin, ymin, xmax, ymax)
    bounds: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if not 0.0 < self.control_step <= self.position_step:
            raise ValueError("need 0 < control_step <= position_step")
        if self.heading_bins < 16:
            raise ValueError("need at least 16 heading bins")
        if self.bounds is not None:
            x0, y0, x1, y1 = self.bounds
            if not (x1 > x0 and y1 > y0):
                raise ValueError(f"empty bounds {self.bounds}")

    @property
    def resolution(self) -> float:
        """Envelope on |lattice - continuous optimum| used by the acceptance checks."""
        return 0.05 + 3.0 * self.control_step

    def for_query(self, x: Config, y: Config, margin: float = 4.0) -> "LatticeSpec":
        b = (min(x.x, y.x) - margin, min(x.y, y.y) - margin,
             max(x.x, y.x) + margin, max(x.y, y.y) + margin)
        return LatticeSpec(self.position_step, self.heading_bins, self.control_step, b)


def lattice_shortest(x: Config, y: Config, spec: LatticeSpec | None = None) -> float:
    """Length of the shortest bang-bang control sequence from x's cell to y's cell.

    Headings live on the lattice ``x.theta + k * dtheta`` with
    ``dtheta = 2*pi / (TURN_REFINE * heading_bins)``. A turn move holds
    curvature +-1 for the ``m`` micro-steps that advance one heading step; a
    straight move is one micro-step of length ``dtheta / m``, with ``m`` chosen
    so it is as close as possible to ``control_step``. The goal is y's
    position cell with any lattice heading inside y's heading bin.
    """
    spec = spec or LatticeSpec()
    if spec.bounds is None:
        spec = spec.for_query(x, y)
    x0, y0, x1, y1 = spec.bounds
    # snap the box corner to the goal lattice
    x0 = math.floor(x0 / spec.position_step) * spec.position_step
    y0 = math.floor(y0 / spec.position_step) * spec.position_step
    for c in (x, y):
        if not (x0 <= c.x < x1 and y0 <= c.y < y1):
            raise ValueError(f"{c} outside lattice bounds {spec.bounds}")
    h = spec.position_step
    # de-duplication cells are h/SPLIT wide; the goal test uses the h cell
    hd = h / SPLIT
    nb = spec.heading_bins * TURN_REFINE
    nx = int(math.ceil((x1 - x0) / hd))
    ny = int(math.ceil((y1 - y0) / hd))
    dtheta = TWO_PI / nb
    m = max(1, round(dtheta / spec.control_step))
    unit = dtheta / m

    def keys(px, py, k):
        ix = np.floor((px - x0) / hd).astype(np.int64)
        iy = np.floor((py - y0) / hd).astype(np.int64)
        inside = (ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny)
        return (ix * ny + iy) * nb + k, inside

    off = (x.theta + dtheta * np.arange(nb) - y.theta + math.pi) % TWO_PI - math.pi
    kgoals = np.nonzero(np.abs(off) <= math.pi / spec.heading_bins + 1e-12)[0]
    gx = int(math.floor((y.x - x0) / h)) * SPLIT
    gy = int(math.floor((y.y - y0) / h)) * SPLIT
    goals = np.array([((gx + i) * ny + gy + j) * nb + k
                      for i in range(SPLIT) for j in range(SPLIT) for k in kgoals
                      if gx + i < nx and gy + j < ny])
    start = int(keys(np.array([x.x]), np.array([x.y]), np.array([0]))[0][0])
    if start in goals:
        return 0.0

    # displacement of one turn move, in the frame of the heading it starts from
    fwd, side = math.sin(dtheta), 1.0 - math.cos(dtheta)
    cos_k = np.cos(x.theta + dtheta * np.arange(nb))
    sin_k = np.sin(x.theta + dtheta * np.arange(nb))

    visited = np.zeros(nx * ny * nb, dtype=bool)
    visited[start] = True
    buckets: dict[int, list[tuple[np.ndarray, ...]]] = {}
    px, py = np.array([x.x]), np.array([x.y])
    pk, pkey = np.array([0]), np.array([start])
    layer = 0
    while True:
        c, s = cos_k[pk], sin_k[pk]
        # straight: one micro-step; may stay in the parent's cell
        buckets.setdefault(layer + 1, []).append(
            (px + unit * c, py + unit * s, pk, pkey))
        for turn in (1, -1):
            nx_ = px + fwd * c - turn * side * s
            ny_ = py + fwd * s + turn * side * c
            buckets.setdefault(layer + m, []).append(
                (nx_, ny_, (pk + turn) % nb, np.full(pk.size, -1)))
        while True:
            if not buckets:
                raise Unreachable(f"goal cell of {y} not reached inside {spec.bounds}; "
                                  "enlarge the bounds")
            layer = min(buckets)
            qx, qy, qk, parent = (np.concatenate(a) for a in zip(*buckets.pop(layer)))
            qkey, inside = keys(qx, qy, qk)
            # a straight step still inside its parent's cell continues that lineage
            keep = inside & (~visited[np.where(inside, qkey, 0)] | (qkey == parent))
            if not keep.any():
                continue
            sel = np.nonzero(keep)[0]
            ukey, first = np.unique(qkey[sel], return_index=True)
            sel = sel[first]
            visited[ukey] = True
            if visited[goals].any():
                return layer * unit
            px, py, pk, pkey = qx[sel], qy[sel], qk[sel], ukey
            break


def check_polar_bound(p: SampledPath, tol: float = 1e-6) -> tuple[float, float]:
    """Measured length and swept polar angle of a curve that stays outside the unit disk.

    The curve must start at (1, 0). The polar angle is accumulated sample by
    sample, so winding past 2*pi is counted.
    """
    r = np.hypot(p.x, p.y)
    bad = np.nonzero(r < 1.0 - tol)[0]
    if bad.size:
        raise RadiusViolation(f"sample {int(bad[0])} at radius {r[bad[0]]!r} < 1")
    if abs(p.x[0] - 1.0) > tol or abs(p.y[0]) > tol:
        raise ValueError("curve must start at (1, 0)")
    phi = np.unwrap(np.arctan2(p.y, p.x))
    return p.chord_length(), float(phi[-1] - phi[0])


def check_projection_bound(p: SampledPath, direction=(0.0, 1.0)) -> tuple[float, float]:
    """Measured length and displacement of the curve projected on ``direction``."""
    d = np.asarray(direction, dtype=float)
    d = d / np.hypot(*d)
    z = (p.x[-1] - p.x[0]) * d[0] + (p.y[-1] - p.y[0]) * d[1]
    return p.chord_length(), float(z)


def random_query_pairs(count: int, seed: int, half_width: float = 5.0) -> list[tuple[Config, Config]]:
    """Seeded endpoint pairs in [-w, w]^2 x [0, 2*pi)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = rng.uniform([-half_width, -half_width, 0.0], [half_width, half_width, TWO_PI], size=(2, 3))
        out.append((Config(*a[0]), Config(*a[1])))
    return out


@dataclass(frozen=True)
class Comparison:
    x: Config
    y: Config
    analytic: float
    lattice: float

    @property
    def gap(self) -> float:
        return abs(self.analytic - self.lattice)


def _compare(args) -> Comparison:
    from .dubins import dubins_length

    x, y, spec = args
    return Comparison(x, y, dubins_length(x, y), lattice_shortest(x, y, spec))


def compare_batch(pairs, spec: LatticeSpec | None = None, workers: int | None = None) -> list[Comparison]:
    """Analytic against lattice length for every pair; queries run in parallel processes."""
    spec = spec or LatticeSpec()
    jobs = [(x, y, spec) for x, y in pairs]
    workers = workers if workers is not None else (os.cpu_count() or 1)
    if workers <= 1 or len(jobs) <= 1:
        return [_compare(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compare, jobs))
