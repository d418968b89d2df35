"""Replace an arbitrary bounded-curvature path by a cs path that is no longer.

The path is cut into fragments shorter than 1, each fragment is replaced by
the shortest CSC path between its end configurations, and the pieces are
concatenated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as g
from .cspath import CsPath, SampledPath, canonicalize, validate
from .dubins import CSC_TYPES, solve_csc
from .geometry import Config


class BadMaxLen(ValueError):
    pass


class NoTangent(RuntimeError):
    """No CSC construction exists for a fragment; impossible for a valid fragment."""


class FragmentError(RuntimeError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        self.cause = cause
        super().__init__(f"fragment {index}: {cause}")


@dataclass(frozen=True)
class Fragmentation:
    cut_points: tuple[float, ...]

    def __post_init__(self):
        t = self.cut_points
        if not t or t[0] != 0.0:
            raise ValueError("a fragmentation starts at 0")
        for a, b in zip(t, t[1:]):
            if not a < b:
                raise ValueError(f"cut points must increase strictly: {a!r} >= {b!r}")
            if not b - a < 1.0:
                raise ValueError(f"fragment [{a!r}, {b!r}] is not shorter than 1")

    @property
    def gaps(self) -> list[float]:
        return [b - a for a, b in zip(self.cut_points, self.cut_points[1:])]

    def __len__(self) -> int:
        return len(self.cut_points) - 1


def fragmentize(p: SampledPath | float, max_len: float = 0.9) -> Fragmentation:
    """Uniform cuts at spacing at most ``max_len``."""
    if not 0.0 < max_len < 1.0:
        raise BadMaxLen(f"max_len must lie in (0, 1), got {max_len!r}")
    total = p if isinstance(p, (int, float)) else p.total_length
    if total == 0.0:
        return Fragmentation((0.0,))
    m = max(1, math.ceil(total / max_len))
    return Fragmentation(tuple(i * total / m for i in range(m)) + (float(total),))


@dataclass(frozen=True)
class Region:
    """Unit disk about the anchor minus the open disks of both adjacent circles."""

    anchor: Config

    def violation(self, q: g.Point, tol: float = 1e-9) -> str | None:
        z = self.anchor.position
        if g.dist(q, z) > 1.0 + tol:
            return "outside the unit disk about the anchor"
        left, right = g.adjacent_circles(self.anchor)
        if g.dist(q, left.center) < 1.0 - tol:
            return "inside the left adjacent disk"
        if g.dist(q, right.center) < 1.0 - tol:
            return "inside the right adjacent disk"
        return None

    def contains(self, q: g.Point, tol: float = 1e-9) -> bool:
        return self.violation(q, tol) is None

    def side(self, q: g.Point) -> int:
        """+1 ahead of the anchor, -1 behind, 0 on the normal line."""
        v = g.dot(g.sub(q, self.anchor.position), self.anchor.heading)
        return (v > 0) - (v < 0)


@dataclass(frozen=True)
class RegionReport:
    violations: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_region(fragment: SampledPath, tol: float = 1e-9) -> RegionReport:
    """Samples of the fragment that leave the region anchored at its first pose."""
    reg = Region(fragment.start)
    bad = []
    for i in range(len(fragment)):
        why = reg.violation((float(fragment.x[i]), float(fragment.y[i])), tol)
        if why:
            bad.append((i, why))
    return RegionReport(bad)


def check_direction(fragment: SampledPath) -> bool:
    """True iff the tangent keeps a positive inner product with the initial heading."""
    return bool(np.all(np.cos(fragment.theta - fragment.theta[0]) > 0.0))


def replace_fragment(fragment: SampledPath) -> CsPath:
    """Shortest CSC path between the fragment's end configurations, arcs below pi."""
    x, y = fragment.start, fragment.end
    best = None
    for t in CSC_TYPES:
        sol = solve_csc(x, y, t)
        if sol is None or sol.lengths[0] >= math.pi or sol.lengths[2] >= math.pi:
            continue
        if best is None or sol.total < best.total:
            best = sol
    if best is None:
        raise NoTangent(f"no CSC path with arcs below pi joins {x} and {y}")
    return best.path


@dataclass(frozen=True)
class Normalization:
    path: CsPath
    fragmentation: Fragmentation
    replacements: tuple[CsPath, ...]

    @property
    def fragment_count(self) -> int:
        return len(self.fragmentation)


def _snap(p: SampledPath, frag: Fragmentation) -> list[int]:
    """Sample index nearest to every cut point."""
    s = p.s
    idx = [0]
    for t in frag.cut_points[1:-1]:
        j = int(np.searchsorted(s, t))
        if j > 0 and (j == len(s) or t - s[j - 1] <= s[j] - t):
            j -= 1
        if j > idx[-1]:
            idx.append(j)
    if len(s) - 1 > idx[-1]:
        idx.append(len(s) - 1)
    return idx


def normalize_detailed(p: SampledPath, max_len: float = 0.9, check: bool = True) -> Normalization:
    if check:
        validate(p)
    frag = fragmentize(p, max_len)
    idx = _snap(p, frag)
    cuts = Fragmentation(tuple(float(p.s[i]) for i in idx))
    reps = []
    for k, (i, j) in enumerate(zip(idx, idx[1:])):
        piece = p.slice(i, j)
        try:
            if not check_direction(piece):
                raise NoTangent("fragment has a negative direction")
            reps.append(replace_fragment(piece))
        except Exception as e:
            raise FragmentError(k, e) from e
    comps = [c for r in reps for c in r.components]
    path = canonicalize(CsPath(p.start, tuple(comps)), drop_loops=True)
    return Normalization(path, cuts, tuple(reps))


def normalize(p: SampledPath, max_len: float = 0.9) -> CsPath:
    """A cs path with p's end configurations and length at most length(p) (up to sampling)."""
    return normalize_detailed(p, max_len).path


def discretization_allowance(p: SampledPath) -> float:
    """Per-fragment length allowance 10 * step**2 for the coarsest sample spacing."""
    if len(p) < 2:
        return 0.0
    return 10.0 * float(np.max(np.diff(p.s))) ** 2
