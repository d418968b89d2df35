"""Concatenations of line segments and unit-circle arcs ("cs paths").

Also holds :class:`SampledPath`, the discrete stand-in for an arbitrary
bounded-curvature path, with its CSV and ingestion checks.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import TWO_PI, Config

SENSES = ("L", "S", "R")


class OutOfRange(ValueError):
    pass


class BadStep(ValueError):
    pass


class FullLoop(ValueError):
    """Merging arcs produced a turn of 2*pi or more."""


class IngestionError(ValueError):
    """A sampled path violates one of the ingestion invariants."""

    def __init__(self, invariant: str, row: int, detail: str = ""):
        self.invariant = invariant
        self.row = row
        msg = f"{invariant} violated at row {row}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True)
class CsComponent:
    sense: str
    length: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of L, S, R, got {self.sense!r}")
        length = float(self.length)
        object.__setattr__(self, "length", length)
        if not length >= 0.0:
            raise ValueError(f"component length must be >= 0, got {length!r}")
        if self.sense != "S" and length >= TWO_PI:
            raise FullLoop(f"arc of length {length!r} is a full loop or more")

    @property
    def is_arc(self) -> bool:
        return self.sense != "S"


def advance(c: Config, sense: str, s: float) -> Config:
    """Pose reached after travelling ``s`` along one constant-curvature piece."""
    th = c.theta
    if sense == "S":
        return Config(c.x + s * math.cos(th), c.y + s * math.sin(th), th)
    if sense == "L":
        t2 = th + s
        return Config(c.x + math.sin(t2) - math.sin(th), c.y - math.cos(t2) + math.cos(th), t2)
    t2 = th - s
    return Config(c.x - math.sin(t2) + math.sin(th), c.y + math.cos(t2) - math.cos(th), t2)


@dataclass(frozen=True)
class CsPath:
    start: Config
    components: tuple[CsComponent, ...] = ()

    def __post_init__(self):
        comps = tuple(c if isinstance(c, CsComponent) else CsComponent(*c)
                      for c in self.components)
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, start: Config, spec: Iterable[tuple[str, float]]) -> "CsPath":
        return cls(start, tuple(CsComponent(s, l) for s, l in spec))

    @property
    def word(self) -> str:
        return "".join(c.sense for c in self.components)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(c.length for c in self.components)

    def __len__(self) -> int:
        return len(self.components)


def length(p: CsPath) -> float:
    return math.fsum(c.length for c in p.components)


def complexity(p: CsPath) -> int:
    return len(canonicalize(p).components)


def endpoint(p: CsPath) -> Config:
    c = p.start
    for comp in p.components:
        c = advance(c, comp.sense, comp.length)
    return c


def evaluate(p: CsPath, s: float, tol: float = 1e-12) -> Config:
    total = length(p)
    if s < -tol or s > total + tol * max(1.0, total):
        raise OutOfRange(f"arclength {s!r} outside [0, {total!r}]")
    if s >= total:
        return endpoint(p)
    c = p.start
    remaining = max(s, 0.0)
    for comp in p.components:
        if remaining >= comp.length:
            c = advance(c, comp.sense, comp.length)
            remaining -= comp.length
        else:
            return advance(c, comp.sense, remaining)
    return c


def component_starts(p: CsPath) -> list[Config]:
    """Pose at the start of every component (plus the final endpoint)."""
    poses = [p.start]
    for comp in p.components:
        poses.append(advance(poses[-1], comp.sense, comp.length))
    return poses


def merge_components(comps: Sequence[CsComponent], drop_loops: bool = False) -> tuple[CsComponent, ...]:
    out: list[list] = []
    for c in comps:
        if c.length == 0.0:
            continue
        if out and out[-1][0] == c.sense:
            out[-1][1] += c.length
        else:
            out.append([c.sense, c.length])
    result = []
    for sense, ell in out:
        if sense != "S" and ell >= TWO_PI:
            if not drop_loops:
                raise FullLoop(f"merged {sense} arc of length {ell!r} is a full loop")
            # whole turns return to the same pose
            ell = math.fmod(ell, TWO_PI)
            if ell == 0.0:
                continue
        result.append(CsComponent(sense, ell))
    if drop_loops and len(result) != len(out):
        # removing a loop may make two neighbours share a sense
        return merge_components(result, drop_loops=True)
    return tuple(result)


def canonicalize(p: CsPath, drop_loops: bool = False) -> CsPath:
    """Drop zero-length pieces and merge neighbours with the same sense.

    With ``drop_loops`` a merged arc of 2*pi or more loses its whole turns
    (a shorter path with the same endpoint); otherwise that raises FullLoop.
    """
    return CsPath(p.start, merge_components(p.components, drop_loops))


def reverse_path(p: CsPath) -> CsPath:
    """The same curve traversed backwards: L and R swap, order reverses."""
    flip = {"L": "R", "R": "L", "S": "S"}
    end = endpoint(p).reversed()
    return CsPath(end, tuple(CsComponent(flip[c.sense], c.length) for c in reversed(p.components)))


def reflect_path(p: CsPath) -> CsPath:
    """Mirror across the x axis: L and R swap, order is kept."""
    flip = {"L": "R", "R": "L", "S": "S"}
    return CsPath(p.start.reflected(), tuple(CsComponent(flip[c.sense], c.length) for c in p.components))


def sub_path(p: CsPath, i: int, j: int) -> CsPath:
    """Components ``i:j`` as a path starting from the pose where they begin."""
    start = p.start
    for comp in p.components[:i]:
        start = advance(start, comp.sense, comp.length)
    return CsPath(start, p.components[i:j])


# -- serialization -----------------------------------------------------------

def _num(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v!r}")
    return format(v, ".17g")


def to_json(p: CsPath) -> str:
    comps = ", ".join(f'{{"sense": "{c.sense}", "length": {_num(c.length)}}}'
                      for c in p.components)
    s = p.start
    return (f'{{"start": {{"x": {_num(s.x)}, "y": {_num(s.y)}, "theta": {_num(s.theta)}}}, '
            f'"components": [{comps}]}}')


def from_dict(d: dict) -> CsPath:
    st = d["start"]
    start = Config(float(st["x"]), float(st["y"]), float(st["theta"]))
    return CsPath(start, tuple(CsComponent(c["sense"], float(c["length"])) for c in d["components"]))


def from_json(text: str) -> CsPath:
    return from_dict(json.loads(text))


# -- sampled paths -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampledPath:
    """Arclength-ordered poses of a bounded-curvature path.

    Arrays are read-only numpy vectors of equal length; ``theta`` is
    normalized to [0, 2*pi).
    """

    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.s, self.x, self.y, self.theta)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1 or arrs[0].size == 0:
            raise ValueError("s, x, y, theta must be non-empty 1-D arrays of equal length")
        arrs[3] = np.mod(arrs[3], TWO_PI)
        arrs[3][arrs[3] >= TWO_PI] = 0.0
        for name, a in zip(("s", "x", "y", "theta"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_poses(cls, s: Sequence[float], poses: Sequence[Config]) -> "SampledPath":
        return cls(np.asarray(s, float), np.array([c.x for c in poses]),
                   np.array([c.y for c in poses]), np.array([c.theta for c in poses]))

    def __len__(self) -> int:
        return self.s.size

    @property
    def total_length(self) -> float:
        return float(self.s[-1] - self.s[0])

    def pose(self, i: int) -> Config:
        return Config(self.x[i], self.y[i], self.theta[i])

    @property
    def start(self) -> Config:
        return self.pose(0)

    @property
    def end(self) -> Config:
        return self.pose(-1)

    @property
    def samples(self) -> list[tuple[float, Config]]:
        return [(float(self.s[i]), self.pose(i)) for i in range(len(self))]

    def slice(self, i: int, j: int) -> "SampledPath":
        """Samples ``i..j`` inclusive, re-based so arclength starts at 0."""
        return SampledPath(self.s[i:j + 1] - self.s[i], self.x[i:j + 1], self.y[i:j + 1],
                           self.theta[i:j + 1])

    def chord_length(self) -> float:
        return float(np.hypot(np.diff(self.x), np.diff(self.y)).sum())

    def heading_increments(self) -> np.ndarray:
        d = np.diff(self.theta)
        return (d + math.pi) % TWO_PI - math.pi


def _arclengths(total: float, step: float) -> list[float]:
    n = int(math.floor(total / step))
    ss = [k * step for k in range(n + 1) if k * step < total - 1e-9 * step] or [0.0]
    if total > 0.0:
        ss.append(total)
    return ss


def sample(p: CsPath, step: float) -> SampledPath:
    """Poses at arclengths 0, step, 2*step, ... and exactly at the end."""
    if not step > 0.0:
        raise BadStep(f"step must be positive, got {step!r}")
    total = length(p)
    ss = _arclengths(total, step)
    starts = component_starts(p)
    offsets = [0.0]
    for comp in p.components:
        offsets.append(offsets[-1] + comp.length)
    poses = []
    k = 0
    for si in ss[:-1]:
        while k + 1 < len(p.components) and si >= offsets[k + 1]:
            k += 1
        poses.append(advance(starts[k], p.components[k].sense, si - offsets[k]))
    poses.append(starts[-1])
    return SampledPath.from_poses(ss, poses)


def sample_function(func, total: float, step: float) -> SampledPath:
    """Sample a pose function ``func(s) -> (x, y, theta)`` on the same grid as :func:`sample`."""
    if not step > 0.0:
        raise BadStep(f"step must be positive, got {step!r}")
    ss = _arclengths(total, step)
    pts = np.array([func(si) for si in ss], dtype=float)
    return SampledPath(np.array(ss), pts[:, 0], pts[:, 1], pts[:, 2])


@dataclass(frozen=True)
class IngestionPolicy:
    curvature_slack: float = 0.05
    # multiple of the worst chord deviation (1 + slack) * ds^2 / 2 that a
    # curvature-bounded piece can show against the mid-heading prediction
    consistency: float = 1.0
    abs_tol: float = 1e-9


def validate(p: SampledPath, policy: IngestionPolicy = IngestionPolicy()) -> SampledPath:
    """Check the sampled-path invariants; raise IngestionError naming the first violation."""
    s = p.s
    if s[0] != 0.0:
        raise IngestionError("arclength must start at 0", 0, f"s0={s[0]!r}")
    ds = np.diff(s)
    bad = np.nonzero(~(ds > 0.0))[0]
    if bad.size:
        raise IngestionError("arclength strictly increasing", int(bad[0]) + 1)
    if not np.all(np.isfinite(p.x)) or not np.all(np.isfinite(p.y)):
        raise IngestionError("finite coordinates", int(np.nonzero(~np.isfinite(p.x + p.y))[0][0]))
    if len(p) == 1:
        return p
    dth = p.heading_increments()
    kappa = np.abs(dth) / ds
    bad = np.nonzero(kappa > 1.0 + policy.curvature_slack)[0]
    if bad.size:
        i = int(bad[0])
        raise IngestionError("discrete curvature |dtheta/ds| <= 1 + slack", i + 1,
                             f"estimate {kappa[i]:.6g}")
    mid = p.theta[:-1] + 0.5 * dth
    ex = np.diff(p.x) - ds * np.cos(mid)
    ey = np.diff(p.y) - ds * np.sin(mid)
    err = np.hypot(ex, ey)
    allowed = policy.consistency * 0.5 * (1.0 + policy.curvature_slack) * ds * ds
    bad = np.nonzero(err > allowed + policy.abs_tol)[0]
    if bad.size:
        i = int(bad[0])
        raise IngestionError("position/heading/arclength consistency", i + 1,
                             f"chord deviates by {err[i]:.3g} over ds={ds[i]:.3g}")
    return p


def to_csv(p: SampledPath) -> str:
    buf = io.StringIO()
    buf.write("s,x,y,theta\n")
    for row in zip(p.s, p.x, p.y, p.theta):
        buf.write(",".join(_num(float(v)) for v in row) + "\n")
    return buf.getvalue()


def from_csv(text: str) -> SampledPath:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["s", "x", "y", "theta"]:
        raise IngestionError("header 's,x,y,theta'", 0)
    rows = []
    for i, row in enumerate(reader, start=1):
        if not row:
            continue
        try:
            rows.append([float(v) for v in row])
        except ValueError:
            raise IngestionError("numeric fields", i) from None
        if len(row) != 4:
            raise IngestionError("four fields per row", i)
    if not rows:
        raise IngestionError("at least one sample", 1)
    a = np.array(rows)
    return SampledPath(a[:, 0], a[:, 1], a[:, 2], a[:, 3])
