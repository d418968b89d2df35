"""Rewrite rules that shorten a cs path or lower its complexity.

Each rule acts on a window of consecutive components and returns a
``ReductionStep`` whose result has the same end configurations. The driver
``reduce_to_minimizer`` applies rules until none fires; every step strictly
decreases (length, complexity) lexicographically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import geometry as g
from .cspath import (CsComponent, CsPath, canonicalize, complexity, component_starts,
                     endpoint, length, reverse_path, sub_path, to_json)
from .dubins import CSC_TYPES, CCC_TYPES, DubinsSolution, solve_ccc, solve_csc
from .geometry import Config

PATTERNS = {
    "C1": "CSCSC",
    "C2": "CSCCSC",
    "SCS": "SCS",
    "CCS": "CCS",
    "SCC": "SCC",
    "CCC": "CCC",
    "CCCC": "CCCC",
}

ITERATION_CAP = 10_000
# a step that does not lower the complexity must shorten by more than this;
# smaller gains come in geometric cascades that never reach a fixed point
MIN_DECREASE = 1e-9


class ReductionInternal(RuntimeError):
    """A state the theory rules out; carries the offending path."""

    def __init__(self, message: str, path: CsPath | None = None):
        self.path = path
        if path is not None:
            message = f"{message}\n{to_json(path)}"
        super().__init__(message)


class SearchFailed(ReductionInternal):
    pass


class IterationCap(RuntimeError):
    pass


class DegenerateWindow(ValueError):
    pass


@dataclass(frozen=True)
class ComponentWindow:
    path: CsPath
    start_index: int
    pattern: str

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        comps = self.components
        if len(comps) != len(PATTERNS[self.pattern]) or not _matches(comps, PATTERNS[self.pattern]):
            raise ValueError(f"components at {self.start_index} do not form {self.pattern}")

    @property
    def stop_index(self) -> int:
        return self.start_index + len(PATTERNS[self.pattern])

    @property
    def components(self) -> tuple[CsComponent, ...]:
        return self.path.components[self.start_index:self.start_index + len(PATTERNS[self.pattern])]

    @property
    def sub_path(self) -> CsPath:
        return sub_path(self.path, self.start_index, self.stop_index)

    @property
    def length(self) -> float:
        return math.fsum(c.length for c in self.components)

    @property
    def start_config(self) -> Config:
        return self.sub_path.start

    @property
    def end_config(self) -> Config:
        return endpoint(self.sub_path)


@dataclass(frozen=True)
class ReductionStep:
    before: CsPath
    after: CsPath
    rule: str
    length_delta: float
    complexity_delta: int
    detail: str = ""

    def to_dict(self) -> dict:
        return {"rule": self.rule, "detail": self.detail,
                "length_delta": self.length_delta, "complexity_delta": self.complexity_delta,
                "after": json.loads(to_json(self.after))}


@dataclass(frozen=True)
class NotAdmissible:
    window: ComponentWindow
    reason: str


def _matches(comps, pattern: str) -> bool:
    for c, want in zip(comps, pattern):
        if c.length <= 0.0:
            return False
        if (want == "S") != (c.sense == "S"):
            return False
    # neighbouring arcs of a window turn opposite ways
    return all(not (a.is_arc and b.is_arc and a.sense == b.sense) for a, b in zip(comps, comps[1:]))


def find_windows(p: CsPath, patterns: Iterable[str] = PATTERNS) -> list[ComponentWindow]:
    """Every match of every pattern, ordered by start index then pattern."""
    order = list(patterns)
    out = []
    for i in range(len(p.components)):
        for name in order:
            k = len(PATTERNS[name])
            if i + k <= len(p.components) and _matches(p.components[i:i + k], PATTERNS[name]):
                out.append(ComponentWindow(p, i, name))
    return out


def _splice(w: ComponentWindow, comps: Iterable[CsComponent]) -> CsPath:
    p = w.path
    new = p.components[:w.start_index] + tuple(comps) + p.components[w.stop_index:]
    return canonicalize(CsPath(p.start, new), drop_loops=True)


def _step(w: ComponentWindow, comps: Iterable[CsComponent], rule: str, detail: str = "") -> ReductionStep:
    after = _splice(w, comps)
    return ReductionStep(w.path, after, rule, length(after) - length(w.path),
                         complexity(after) - complexity(w.path), detail)


def _csc_candidates(x: Config, y: Config) -> list[DubinsSolution]:
    return [s for s in (solve_csc(x, y, t) for t in CSC_TYPES) if s is not None]


def _best(cands: list[tuple[float, tuple[CsComponent, ...], str]], w: ComponentWindow | None = None,
          context: tuple = ((), ())):
    """Shortest candidate; with a window, the one leaving the fewest pieces after
    splicing wins and length breaks ties."""
    if not cands:
        return None
    if w is None:
        return min(cands, key=lambda c: c[0])
    pre, post = context
    return min(cands, key=lambda c: (complexity(_splice(w, pre + tuple(c[1]) + post)), c[0]))


# -- C1 / C2 ----------------------------------------------------------------

def reduce_admissible(w: ComponentWindow) -> ReductionStep | NotAdmissible:
    """Replace a CSCSC or CSCCSC window by the shortest CSC path that is no longer."""
    if w.pattern not in ("C1", "C2"):
        raise ValueError(f"reduce_admissible needs a C1 or C2 window, got {w.pattern}")
    cands = _csc_candidates(w.start_config, w.end_config)
    if not cands:
        return NotAdmissible(w, "no CSC path joins the window ends")
    best = min(cands, key=lambda s: s.total)
    if best.total > w.length:
        return NotAdmissible(w, f"shortest CSC ({best.path_type}, {best.total:.12g}) "
                                f"is longer than the window ({w.length:.12g})")
    return _step(w, best.path.components, "admissible", best.path_type)


# -- SCS and its mirrors ----------------------------------------------------

def _line_circle_scc(x: Config, y: Config, sense: str, max_t: float) -> list[tuple[CsComponent, ...]]:
    """S-C-C paths from x to y: a segment along x's heading, an arc of ``sense``
    tangent to that line, then an arc of the opposite sense on y's adjacent circle.

    The middle circle slides along x's line until it touches y's circle; each
    touching position with segment length in [0, max_t] gives one path.
    """
    s = g.sense_sign(sense)
    other = "R" if sense == "L" else "L"
    c1 = g.adjacent_circle(y, other)
    u = x.heading
    # centre of the sliding circle at segment length t is q0 + t*u
    q0 = g.add(x.position, g.scale(g.left_normal(u), s))
    w = g.sub(q0, c1.center)
    b = g.dot(w, u)
    disc = b * b - (g.dot(w, w) - 4.0)
    if disc < 0.0:
        return []
    out = []
    for t in {-b - math.sqrt(disc), -b + math.sqrt(disc)}:
        if not -1e-12 <= t <= max_t + 1e-12:
            continue
        t = min(max(t, 0.0), max_t)
        a = g.add(x.position, g.scale(u, t))
        c2 = g.Circle(g.add(q0, g.scale(u, t)), sense)
        touch = g.scale(g.add(c2.center, c1.center), 0.5)
        try:
            arc2 = g.arc_between(c2, a, touch)
            arc1 = g.arc_between(c1, touch, y.position)
        except g.OffCircle:
            continue
        out.append((CsComponent("S", t), CsComponent(sense, arc2), CsComponent(other, arc1)))
    return out


def _mirror_ccs(x: Config, y: Config, sense: str, max_t: float) -> list[tuple[CsComponent, ...]]:
    """C-C-S paths from x to y built by running the S-C-C slide on the reversed problem."""
    flip = {"L": "R", "R": "L", "S": "S"}
    out = []
    for comps in _line_circle_scc(y.reversed(), x.reversed(), flip[sense], max_t):
        rev = reverse_path(CsPath(y.reversed(), comps))
        out.append(rev.components)
    return out


def _score(x: Config, comps: tuple[CsComponent, ...], y: Config, tol: float = 1e-9) -> float | None:
    """Length of the candidate, or None when it misses y."""
    e = endpoint(CsPath(x, comps))
    if g.dist(e.position, y.position) > tol or abs(g.wrap_to_pi(e.theta - y.theta)) > tol:
        return None
    return math.fsum(c.length for c in comps)


def _general_candidates(x: Config, y: Config) -> list[tuple[float, tuple, str]]:
    out = [(s.total, s.path.components, s.path_type) for s in _csc_candidates(x, y)]
    for t in CCC_TYPES:
        s = solve_ccc(x, y, t)
        if s is not None:
            out.append((s.total, s.path.components, s.path_type))
    return out


def shorten_scs(w: ComponentWindow) -> ReductionStep:
    """Shorten an S-C-S window.

    The longer segment is cut so both segments have the same length; the
    remainder stays as a plain segment. On the equal-segment part the first
    segment is cut short where a circle tangent to it also touches the
    adjacent circle at the far end (an S-C-C path, or its C-C-S mirror).
    When that slide yields nothing shorter, the same-sense C-S-C corner cut
    is used, and failing that the shortest closed-form candidate.
    """
    if w.pattern != "SCS":
        raise ValueError(f"shorten_scs needs an SCS window, got {w.pattern}")
    a, arc, b = w.components
    if arc.length == 0.0:
        raise DegenerateWindow("middle arc has zero length")
    ell = min(a.length, b.length)
    pre = (CsComponent("S", a.length - ell),)
    post = (CsComponent("S", b.length - ell),)
    x = g.Config(*g.add(w.start_config.position, g.scale(w.start_config.heading, a.length - ell)),
                 w.start_config.theta)
    core = (CsComponent("S", ell), arc, CsComponent("S", ell))
    y = endpoint(CsPath(x, core))
    old = 2.0 * ell + arc.length

    ctx = (pre, post)
    slid = []
    for comps in _line_circle_scc(x, y, arc.sense, ell) + _mirror_ccs(x, y, arc.sense, ell):
        v = _score(x, comps, y)
        if v is not None:
            slid.append((v, comps, "slide"))
    pick = _best([c for c in slid if c[0] < old - MIN_DECREASE], w, ctx)
    if pick is None:
        cands = []
        corner = solve_csc(x, y, arc.sense + "S" + arc.sense)
        if corner is not None:
            cands.append((corner.total, corner.path.components, "corner"))
        cands += _general_candidates(x, y)
        pick = _best([c for c in cands if c[0] < old - MIN_DECREASE], w, ctx)
    if pick is None:
        pick = _best([c for c in _general_candidates(x, y) if c[0] < old])
    if pick is None:
        # only reachable when the arc is so short the gain is below rounding
        pick = (old, core, "unchanged")
    return _step(w, pre + tuple(pick[1]) + post, "scs", pick[2])


def reduce_ccs_scc(w: ComponentWindow) -> ReductionStep | None:
    """Shorter replacement for a C-C-S or S-C-C window; None if nothing beats it."""
    if w.pattern not in ("CCS", "SCC"):
        raise ValueError(f"reduce_ccs_scc needs a CCS or SCC window, got {w.pattern}")
    if any(c.length == 0.0 for c in w.components):
        raise DegenerateWindow("window has a zero-length component")
    x, y = w.start_config, w.end_config
    old = w.length
    comps = w.components
    cands = []
    if w.pattern == "SCC":
        for c in _line_circle_scc(x, y, comps[1].sense, comps[0].length):
            v = _score(x, c, y)
            if v is not None:
                cands.append((v, c, "slide"))
    else:
        for c in _mirror_ccs(x, y, comps[1].sense, comps[2].length):
            v = _score(x, c, y)
            if v is not None:
                cands.append((v, c, "slide"))
    cands += _general_candidates(x, y)
    pick = _best([c for c in cands if c[0] < old - MIN_DECREASE], w)
    if pick is None:
        return None
    return _step(w, pick[1], w.pattern.lower(), pick[2])


# -- CCC with a short middle arc ---------------------------------------------

def reduce_ccc_short_middle(w: ComponentWindow) -> ReductionStep:
    """Replace a C-C-C window whose middle arc is at most pi by the shortest CSC path."""
    if w.pattern != "CCC":
        raise ValueError(f"reduce_ccc_short_middle needs a CCC window, got {w.pattern}")
    mid = w.components[1].length
    if mid > math.pi + 1e-9:
        raise ValueError(f"middle arc {mid!r} exceeds pi")
    cands = _csc_candidates(w.start_config, w.end_config)
    if not cands:
        raise ReductionInternal("no CSC path joins the ends of a CCC window", w.path)
    best = min(cands, key=lambda s: s.total)
    if best.total > w.length + 1e-12:
        raise ReductionInternal(f"shortest CSC {best.total!r} is longer than the CCC window "
                                f"{w.length!r}", w.path)
    detail = best.path_type + (" boundary" if abs(mid - math.pi) <= 1e-9 else "")
    return _step(w, best.path.components, "ccc", detail)


# -- CCCC --------------------------------------------------------------------

@dataclass(frozen=True)
class CcccFamily:
    """The one-parameter family of four-arc paths with the window's outer circles.

    The parameter is the polar angle of the second centre about the first;
    the third centre follows as the intersection point of the radius-2
    circles about the second and fourth centres on the current side.
    """

    start: Config
    senses: str
    c1: g.Point
    c4: g.Point
    alpha0: float
    side: float
    arcs0: tuple[float, float, float, float]


def cccc_family(w: ComponentWindow) -> CcccFamily:
    if w.pattern != "CCCC":
        raise ValueError(f"need a CCCC window, got {w.pattern}")
    starts = component_starts(w.sub_path)
    senses = "".join(c.sense for c in w.components)
    circles = [g.adjacent_circle(starts[i], senses[i]) for i in range(4)]
    c1, c2, c3, c4 = (c.center for c in circles)
    alpha0 = math.atan2(c2[1] - c1[1], c2[0] - c1[0])
    side = 1.0 if g.cross(g.sub(c4, c2), g.sub(c3, c2)) >= 0.0 else -1.0
    return CcccFamily(starts[0], senses, c1, c4, alpha0, side,
                      tuple(c.length for c in w.components))


def _family_arcs(fam: CcccFamily, alpha: float, y: Config):
    """Arcs of the family member at ``alpha``, the last one measured to y."""
    c2 = g.add(fam.c1, g.scale(g.unit(alpha), 2.0))
    d = g.sub(fam.c4, c2)
    dd = g.norm(d)
    if dd > 4.0 or dd == 0.0:
        return None
    h = math.sqrt(max(4.0 - 0.25 * dd * dd, 0.0))
    c3 = g.add(g.add(c2, g.scale(d, 0.5)), g.scale(g.left_normal(d), fam.side * h / dd))
    centers = (fam.c1, c2, c3, fam.c4)
    pts = [fam.start.position] + [g.scale(g.add(p, q), 0.5) for p, q in zip(centers, centers[1:])] \
        + [y.position]
    out = []
    for i in range(4):
        circ = g.Circle(centers[i], fam.senses[i])
        # plain sweep, no snapping near a full turn: the arcs are followed continuously
        raw = g.sense_sign(circ.sense) * (circ.angle_of(pts[i + 1]) - circ.angle_of(pts[i]))
        out.append(fam.arcs0[i] + g.wrap_to_pi(raw - fam.arcs0[i]))
    return tuple(out)


def cccc_length_profile(w: ComponentWindow) -> tuple[float, Callable[[float], float]]:
    """(alpha0, f) where f(alpha) is the family length; f(alpha0) is the window length."""
    fam = cccc_family(w)
    y = w.end_config

    def f(alpha: float) -> float:
        a = _family_arcs(fam, alpha, y)
        return math.inf if a is None else math.fsum(a)

    return fam.alpha0, f


def second_difference(f: Callable[[float], float], a: float, h: float) -> float:
    return (f(a + h) - 2.0 * f(a) + f(a - h)) / (h * h)


def cccc_instability(w: ComponentWindow, radius: float = 0.2, xtol: float = 1e-6) -> ReductionStep:
    """Slide the two inner circles of a four-arc window to a strictly shorter path.

    The feasible interval around the current parameter ends where the
    inner circles lose contact or an arc shrinks to zero; the minimum over
    that interval is found by a grid scan refined to ``xtol``. An arc that
    reaches zero is dropped, lowering the complexity.
    """
    fam = cccc_family(w)
    y = w.end_config
    a0 = fam.alpha0
    base = w.length

    def arcs(alpha):
        return _family_arcs(fam, alpha, y)

    def feasible(alpha):
        a = arcs(alpha)
        return a is not None and min(a) >= 0.0 and max(a) < 2.0 * math.pi

    def total(alpha):
        a = arcs(alpha)
        if a is None or min(a) < -1e-12 or max(a) >= 2.0 * math.pi:
            return math.inf
        return math.fsum(a)

    def edge(inside, outside):
        # boundary of the feasible set: an arc hits zero or the circles separate
        def gap(t):
            a = arcs(t)
            return -1.0 if a is None else min(a)
        if gap(outside) < 0.0 and arcs(outside) is not None:
            return brentq(gap, inside, outside, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        lo, hi = inside, outside
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if feasible(mid) else (lo, mid)
        return lo

    n = 40
    grid = [a0 + radius * (k / n) for k in range(-n, n + 1)]
    lo_i, hi_i = n, n
    while lo_i > 0 and feasible(grid[lo_i - 1]):
        lo_i -= 1
    while hi_i < 2 * n and feasible(grid[hi_i + 1]):
        hi_i += 1
    lo = grid[lo_i] if lo_i == 0 else edge(grid[lo_i], grid[lo_i - 1])
    hi = grid[hi_i] if hi_i == 2 * n else edge(grid[hi_i], grid[hi_i + 1])
    pts = [lo] + [t for t in grid if lo < t < hi] + [hi]
    vals = [total(t) for t in pts]
    k = int(np.argmin(vals))
    best_a, best_v = pts[k], vals[k]
    if 0 < k < len(pts) - 1:
        res = minimize_scalar(total, bounds=(pts[k - 1], pts[k + 1]), method="bounded",
                              options={"xatol": xtol})
        if res.fun < best_v:
            best_a, best_v = float(res.x), float(res.fun)
    if not best_v < base - MIN_DECREASE:
        # with an inner arc of at most pi the family can sit at a local minimum;
        # the three-arc sub-window around that arc is shortened instead
        for k in (1, 2):
            if w.components[k].length <= math.pi:
                sub = ComponentWindow(w.path, w.start_index + k - 1, "CCC")
                step = reduce_ccc_short_middle(sub)
                return ReductionStep(step.before, step.after, "cccc", step.length_delta,
                                     step.complexity_delta, "short inner arc: " + step.detail)
        raise SearchFailed(f"no shorter four-arc path within {radius} rad of the window", w.path)
    new = arcs(best_a)
    # snap arcs that reached the feasibility edge
    new = tuple(0.0 if v < 1e-12 else v for v in new)
    comps = tuple(CsComponent(s, v) for s, v in zip(fam.senses, new))
    return _step(w, comps, "cccc", f"alpha {a0:.9g} -> {best_a:.9g}")


# -- driver ------------------------------------------------------------------

def _rule_steps(p: CsPath):
    """Every step the rules offer, in rule priority then window order."""
    wins = find_windows(p)
    for w in wins:
        if w.pattern == "CCC" and w.components[1].length <= math.pi:
            yield reduce_ccc_short_middle(w)
    for w in wins:
        if w.pattern == "SCS":
            yield shorten_scs(w)
    for w in wins:
        if w.pattern in ("CCS", "SCC"):
            s = reduce_ccs_scc(w)
            if s is not None:
                yield s
    for w in wins:
        if w.pattern in ("C1", "C2"):
            s = reduce_admissible(w)
            if isinstance(s, ReductionStep):
                yield s
    for w in wins:
        if w.pattern == "CCCC":
            try:
                yield cccc_instability(w)
            except SearchFailed:
                # near-full-turn arcs leave no room to slide; collapse still applies
                continue


def _shortest_candidate(x: Config, y: Config):
    cands = [(s.total, s) for s in _csc_candidates(x, y)]
    for t in CCC_TYPES:
        s = solve_ccc(x, y, t)
        if s is not None and not s.boundary:
            cands.append((s.total, s))
    return min(cands, key=lambda c: c[0])[1]


def collapse(p: CsPath) -> ReductionStep | None:
    """Replace the leftmost four components by the shortest three-piece path between
    their ends, or the whole path when it has at most three pieces of the wrong shape.

    Runs only after every other rule declines, so tiny leftover gains still
    end in a path of complexity at most three.
    """
    p = canonicalize(p, drop_loops=True)
    n = len(p.components)
    if n >= 4:
        i, j = 0, 4
    elif not is_minimizer_shape(p):
        i, j = 0, n
    else:
        return None
    sub = sub_path(p, i, j)
    best = _shortest_candidate(sub.start, endpoint(sub))
    old = math.fsum(c.length for c in sub.components)
    if best.total > old + 1e-12:
        return None
    after = canonicalize(CsPath(p.start, p.components[:i] + best.path.components + p.components[j:]),
                         drop_loops=True)
    return ReductionStep(p, after, "collapse", length(after) - length(p),
                         complexity(after) - complexity(p), best.path_type)


def reduce_to_minimizer(p: CsPath, cap: int = ITERATION_CAP) -> tuple[CsPath, list[ReductionStep]]:
    """Apply the rules until none fires. Returns the final path and the step trace.

    Each round takes the first step found in this order: a rule (in rule
    priority) that lowers the complexity; a four-arc slide that shortens;
    ``collapse`` on a path of four or more pieces; a rule that shortens without adding pieces; ``collapse`` on
    a three-piece path of the wrong shape. Complexity therefore never grows
    and only finitely many shortening steps fit between two drops.
    """
    steps: list[ReductionStep] = []
    cur = canonicalize(p, drop_loops=True)
    if length(cur) < length(p) or complexity(cur) < complexity(p):
        steps.append(ReductionStep(p, cur, "canonicalize", length(cur) - length(p),
                                   complexity(cur) - complexity(p)))
    while True:
        if len(steps) >= cap:
            raise IterationCap(f"no fixed point after {cap} steps")
        step = _next_step(cur)
        if step is None:
            break
        steps.append(step)
        cur = step.after
    if complexity(cur) > 3 or not is_minimizer_shape(cur):
        raise ReductionInternal(f"fixed point {cur.word} is not a minimizer shape", cur)
    return cur, steps


def _next_step(cur: CsPath) -> ReductionStep | None:
    def lowers(s):
        return s.complexity_delta < 0 and s.length_delta <= 1e-12

    def shortens(s):
        return s.complexity_delta <= 0 and s.length_delta < -MIN_DECREASE

    cands = list(_rule_steps(cur))
    for s in cands:
        if lowers(s):
            return s
    # a four-arc slide ends at the family minimum, so it cannot repeat on its window
    for s in cands:
        if s.rule == "cccc" and shortens(s):
            return s
    if complexity(cur) >= 4:
        s = collapse(cur)
        if s is not None and lowers(s):
            return s
    for s in cands:
        if shortens(s):
            return s
    if not is_minimizer_shape(cur):
        s = collapse(cur)
        if s is not None and s.length_delta <= 1e-12:
            return s
    return None


def is_minimizer_shape(p: CsPath) -> bool:
    """True for CSC words (zero pieces allowed) and CCC words with a middle arc above pi."""
    q = canonicalize(p)
    word = q.word
    if len(word) <= 1:
        return True
    if len(word) == 2:
        return word in ("LS", "RS", "SL", "SR", "LR", "RL")
    if len(word) == 3:
        if word[1] == "S":
            return word[0] != "S" and word[2] != "S"
        if "S" not in word:
            return q.components[1].length > math.pi
    return False


def trace_jsonl(steps: Iterable[ReductionStep]) -> str:
    return "".join(json.dumps(s.to_dict()) + "\n" for s in steps)
