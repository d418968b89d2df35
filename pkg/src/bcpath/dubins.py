"""Shortest bounded-curvature paths between two configurations.

Every candidate is built from adjacent circles and their common tangents
(CSC) or from a third unit circle touching both adjacent circles (CCC).
The minimizer is either a CSC path or a CCC path whose middle arc is
longer than pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import geometry as g
from .cspath import CsComponent, CsPath
from .geometry import DEFAULT_POLICY, Config, NumericPolicy

CSC_TYPES = ("LSL", "RSR", "LSR", "RSL")
CCC_TYPES = ("RLR", "LRL")
PATH_TYPES = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

TIE_TOL = 1e-10


class SolverInternalError(RuntimeError):
    pass


@dataclass(frozen=True)
class DubinsSolution:
    path_type: str
    lengths: tuple[float, float, float]
    path: CsPath
    # CCC with a middle arc of exactly pi: never a strict minimizer
    boundary: bool = False

    @property
    def total(self) -> float:
        return math.fsum(self.lengths)

    @property
    def is_ccc(self) -> bool:
        return self.path_type in CCC_TYPES


def _solution(x: Config, t: str, lengths, boundary=False) -> DubinsSolution:
    lengths = tuple(float(v) for v in lengths)
    comps = tuple(CsComponent(s, l) for s, l in zip(t, lengths))
    return DubinsSolution(t, lengths, CsPath(x, comps), boundary)


def solve_csc(x: Config, y: Config, t: str,
              policy: NumericPolicy = DEFAULT_POLICY) -> DubinsSolution | None:
    """Arc on an adjacent circle of x, common tangent, arc on an adjacent circle of y.

    Returns None when the inner tangent needed by LSR/RSL does not exist.
    """
    if t not in CSC_TYPES:
        raise ValueError(f"not a CSC type: {t!r}")
    a = g.adjacent_circle(x, t[0])
    b = g.adjacent_circle(y, t[2])
    try:
        seg = g.common_tangent(a, b, policy=policy)
    except g.TangentNotFound:
        return None
    except g.DegenerateTangent:
        # both configs on the same circle: a single arc
        return _solution(x, t, (g.arc_between(a, x.position, y.position, policy), 0.0, 0.0))
    first = g.arc_between(a, x.position, seg.from_point, policy)
    last = g.arc_between(b, seg.to_point, y.position, policy)
    return _solution(x, t, (first, seg.length, last))


def ccc_branches(x: Config, y: Config, t: str,
                 policy: NumericPolicy = DEFAULT_POLICY) -> list[tuple[float, float, float]]:
    """Arc lengths of both CCC constructions (middle circle on either side)."""
    if t not in CCC_TYPES:
        raise ValueError(f"not a CCC type: {t!r}")
    outer, inner = t[0], t[1]
    c1 = g.adjacent_circle(x, outer)
    c3 = g.adjacent_circle(y, outer)
    d = g.sub(c3.center, c1.center)
    D = g.norm(d)
    if D > 4.0 or D <= policy.coincident:
        return []
    h = math.sqrt(max(4.0 - 0.25 * D * D, 0.0))
    mid = g.scale(g.add(c1.center, c3.center), 0.5)
    n = g.scale(g.left_normal(d), 1.0 / D)
    out = []
    for side in (1.0, -1.0):
        c2 = g.Circle(g.add(mid, g.scale(n, side * h)), inner)
        t1 = g.scale(g.add(c1.center, c2.center), 0.5)
        t2 = g.scale(g.add(c2.center, c3.center), 0.5)
        out.append((g.arc_between(c1, x.position, t1, policy),
                    g.arc_between(c2, t1, t2, policy),
                    g.arc_between(c3, t2, y.position, policy)))
    return out


def solve_ccc(x: Config, y: Config, t: str,
              policy: NumericPolicy = DEFAULT_POLICY) -> DubinsSolution | None:
    """The CCC path whose middle arc exceeds pi; flagged ``boundary`` when it equals pi.

    Returns None when the outer adjacent circles are more than 4 apart.
    """
    branches = ccc_branches(x, y, t, policy)
    if not branches:
        return None
    best = max(branches, key=lambda b: b[1])
    return _solution(x, t, best, boundary=best[1] <= math.pi + policy.tol)


def all_candidates(x: Config, y: Config,
                   policy: NumericPolicy = DEFAULT_POLICY) -> dict[str, DubinsSolution | None]:
    out: dict[str, DubinsSolution | None] = {}
    for t in PATH_TYPES:
        out[t] = solve_csc(x, y, t, policy) if t in CSC_TYPES else solve_ccc(x, y, t, policy)
    return out


def _pick(cands: dict[str, DubinsSolution | None]) -> DubinsSolution:
    strict = [s for s in cands.values() if s is not None and not s.boundary]
    if not any(s.path_type in ("LSL", "RSR") for s in strict):
        raise SolverInternalError("no outer-tangent CSC candidate; this cannot happen in the plane")
    best = min(s.total for s in strict)
    pool = strict
    flagged = [s for s in cands.values() if s is not None and s.boundary]
    if any(s.total < best - TIE_TOL for s in flagged):
        # contradicts the middle-arc rule; only numerical noise gets here
        pool = strict + flagged
        best = min(s.total for s in pool)
    for t in PATH_TYPES:
        s = cands[t]
        if s is not None and s in pool and s.total <= best + TIE_TOL:
            return s
    raise SolverInternalError("empty candidate pool")


def solve_dubins(x: Config, y: Config, policy: NumericPolicy = DEFAULT_POLICY) -> DubinsSolution:
    """Shortest path from x to y; ties resolved in the order LSL, RSR, LSR, RSL, RLR, LRL."""
    return _pick(all_candidates(x, y, policy))


def minimizers(x: Config, y: Config, tol: float = 1e-9,
               policy: NumericPolicy = DEFAULT_POLICY) -> list[DubinsSolution]:
    """Every non-boundary candidate within ``tol`` of the optimum."""
    cands = [s for s in all_candidates(x, y, policy).values() if s is not None and not s.boundary]
    best = min(s.total for s in cands)
    return [s for s in cands if s.total <= best + tol]


def dubins_length(x: Config, y: Config) -> float:
    return solve_dubins(x, y).total
