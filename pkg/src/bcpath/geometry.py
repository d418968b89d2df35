"""Planar geometry primitives for unit-turning-radius paths.

Curvature is normalized so the minimum turning radius is 1 everywhere in
this package. Points are plain ``(x, y)`` float tuples; every value type is
a frozen dataclass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Tuple

Point = Tuple[float, float]
Sense = Literal["L", "R"]

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Base class for geometric construction failures."""


class TangentNotFound(GeometryError):
    """The requested common tangent does not exist (overlapping circles)."""


class DegenerateTangent(GeometryError):
    """Coincident circles with equal senses; the tangent direction is undefined."""


class OffCircle(GeometryError):
    pass


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances shared by the geometric constructions.

    Passed explicitly; ``DEFAULT_POLICY`` is what every function uses when
    no policy is given.
    """

    tol: float = 1e-9
    # centers closer than this are treated as the same circle
    coincident: float = 1e-12


DEFAULT_POLICY = NumericPolicy()


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi)."""
    a = math.fmod(theta, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # a tiny negative input rounds up to exactly 2*pi
    if a >= TWO_PI:
        a = 0.0
    return a


def wrap_to_pi(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = normalize_angle(theta)
    return a - TWO_PI if a > math.pi else a


def unit(theta: float) -> Point:
    return (math.cos(theta), math.sin(theta))


def left_normal(v: Point) -> Point:
    return (-v[1], v[0])


def add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def scale(a: Point, k: float) -> Point:
    return (a[0] * k, a[1] * k)


def dot(a: Point, b: Point) -> float:
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Point, b: Point) -> float:
    return a[0] * b[1] - a[1] * b[0]


def norm(a: Point) -> float:
    return math.hypot(a[0], a[1])


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def sense_sign(sense: str) -> int:
    if sense == "L":
        return 1
    if sense == "R":
        return -1
    raise ValueError(f"not a turning sense: {sense!r}")


@dataclass(frozen=True)
class Config:
    """A point of the unit tangent bundle: position plus heading angle."""

    x: float
    y: float
    theta: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @property
    def position(self) -> Point:
        return (self.x, self.y)

    @property
    def heading(self) -> Point:
        return unit(self.theta)

    def reversed(self) -> "Config":
        """Same point, opposite heading (time reversal)."""
        return Config(self.x, self.y, self.theta + math.pi)

    def transformed(self, dx: float, dy: float, rotation: float) -> "Config":
        """Apply the rigid motion: rotate about the origin, then translate."""
        c, s = math.cos(rotation), math.sin(rotation)
        return Config(c * self.x - s * self.y + dx, s * self.x + c * self.y + dy,
                      self.theta + rotation)

    def reflected(self) -> "Config":
        """Mirror image across the x axis."""
        return Config(self.x, -self.y, -self.theta)


@dataclass(frozen=True)
class Circle:
    """A unit circle with a traversal sense (L counterclockwise, R clockwise)."""

    center: Point
    sense: Sense

    def __post_init__(self):
        sense_sign(self.sense)
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def point_at(self, phi: float) -> Point:
        return add(self.center, unit(phi))

    def angle_of(self, p: Point) -> float:
        return math.atan2(p[1] - self.center[1], p[0] - self.center[0])

    def heading_at(self, p: Point) -> float:
        """Heading angle of a traveller on this circle at point ``p``."""
        return self.angle_of(p) + sense_sign(self.sense) * 0.5 * math.pi


@dataclass(frozen=True)
class TangentSegment:
    from_point: Point
    to_point: Point
    from_circle: Circle
    to_circle: Circle

    @property
    def length(self) -> float:
        return dist(self.from_point, self.to_point)


def adjacent_circles(c: Config) -> tuple[Circle, Circle]:
    """Left and right unit circles tangent to ``c``."""
    n = left_normal(c.heading)
    left = Circle(add(c.position, n), "L")
    right = Circle(sub(c.position, n), "R")
    return left, right


def adjacent_circle(c: Config, sense: str) -> Circle:
    left, right = adjacent_circles(c)
    return left if sense == "L" else right


def common_tangent(a: Circle, b: Circle, kind: str | None = None,
                   policy: NumericPolicy = DEFAULT_POLICY) -> TangentSegment:
    """Tangent segment leaving ``a`` and joining ``b``, consistent with both senses.

    Equal senses use the outer tangent, mixed senses the inner one. ``kind``
    may be given as ``"outer"``/``"inner"`` and must then agree with the senses.
    """
    sa, sb = sense_sign(a.sense), sense_sign(b.sense)
    expected = "outer" if sa == sb else "inner"
    if kind is not None and kind != expected:
        raise ValueError(f"{a.sense}{b.sense} circles need the {expected} tangent, not {kind}")
    d = sub(b.center, a.center)
    D = norm(d)
    if sa == sb:
        if D <= policy.coincident:
            raise DegenerateTangent("coincident circles with equal senses")
        u = scale(d, 1.0 / D)
    else:
        if D < 2.0:
            raise TangentNotFound(f"center distance {D!r} < 2, no inner tangent")
        k = sb - sa  # +-2
        ell = math.sqrt(max(D * D - 4.0, 0.0))
        pd = left_normal(d)
        u = ((ell * d[0] - k * pd[0]) / (D * D), (ell * d[1] - k * pd[1]) / (D * D))
    n = left_normal(u)
    p = sub(a.center, scale(n, sa))
    q = sub(b.center, scale(n, sb))
    return TangentSegment(p, q, a, b)


def arc_between(circ: Circle, from_point: Point, to_point: Point,
                policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Arclength travelled along ``circ`` in its sense, in [0, 2*pi)."""
    for p in (from_point, to_point):
        r = dist(p, circ.center)
        if abs(r - 1.0) > policy.tol:
            raise OffCircle(f"point {p} is at distance {r!r} from the center")
    sweep = circ.angle_of(to_point) - circ.angle_of(from_point)
    a = normalize_angle(sense_sign(circ.sense) * sweep)
    if a > TWO_PI - policy.tol:
        a = 0.0
    return a
