"""Circle-native primitives: angles, arcs, orbital-radial leaders and crossings.

Every quantity lives on concentric circles around the disk center, so all
arithmetic is on angles and radii. Trigonometry only appears in rendering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import DegenerateInput, InvalidArgument

TAU = 2.0 * math.pi
ANGLE_TOL = 1e-9
LENGTH_TOL = 1e-9  # relative to the circumference


def norm_angle(x: float) -> float:
    """Map ``x`` into ``[0, 2*pi)``."""
    y = math.fmod(x, TAU)
    if y < 0.0:
        y += TAU
    # fmod of a tiny negative number can round up to exactly TAU
    if y >= TAU:
        y = 0.0
    return y


def ccw_diff(a: float, b: float) -> float:
    """Counter-clockwise angular distance from ``a`` to ``b`` in ``[0, 2*pi)``."""
    return norm_angle(b - a)


def circ_dist(a: float, b: float) -> float:
    d = ccw_diff(a, b)
    return min(d, TAU - d)


def angles_close(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return circ_dist(a, b) <= tol


def in_open_arc(x: float, start: float, extent: float, tol: float = ANGLE_TOL) -> bool:
    """True iff ``x`` lies strictly inside the ccw arc ``(start, start + extent)``.

    Points within ``tol`` of either end count as outside.
    """
    if extent <= 2.0 * tol:
        return False
    d = ccw_diff(start, x)
    return tol < d < extent - tol


class Direction(str, Enum):
    CW = "cw"
    CCW = "ccw"
    RADIAL = "radial"

    def flipped(self) -> "Direction":
        if self is Direction.CW:
            return Direction.CCW
        if self is Direction.CCW:
            return Direction.CW
        return self


@dataclass(frozen=True)
class PolarPoint:
    radius: float
    angle: float

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise InvalidArgument(f"radius must be non-negative, got {self.radius}")
        object.__setattr__(self, "angle", norm_angle(float(self.angle)))

    @classmethod
    def from_cartesian(cls, x: float, y: float) -> "PolarPoint":
        r = math.hypot(x, y)
        return cls(r, math.atan2(y, x) if r > 0.0 else 0.0)

    def to_cartesian(self) -> tuple[float, float]:
        return self.radius * math.cos(self.angle), self.radius * math.sin(self.angle)


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise arc of the boundary, ``extent`` in ``[0, 2*pi]``."""

    start: float
    extent: float

    def __post_init__(self):
        if not 0.0 <= self.extent <= TAU + ANGLE_TOL:
            raise InvalidArgument(f"arc extent out of range: {self.extent}")
        object.__setattr__(self, "start", norm_angle(self.start))

    @property
    def end(self) -> float:
        return norm_angle(self.start + self.extent)

    @classmethod
    def clockwise(cls, start: float, extent: float) -> "Arc":
        return cls(start - extent, extent)

    def contains(self, x: float, tol: float = ANGLE_TOL) -> bool:
        """Closed-arc membership."""
        if self.extent >= TAU - tol:
            return True
        d = ccw_diff(self.start, x)
        return d <= self.extent + tol or d >= TAU - tol


@dataclass(frozen=True)
class Leader:
    feature: str
    direction: Direction
    span: float
    port: float

    def __post_init__(self):
        object.__setattr__(self, "port", norm_angle(self.port))
        object.__setattr__(self, "direction", Direction(self.direction))

    @property
    def sweep(self) -> Arc:
        """Angular interval covered by the orbital segment, as a ccw arc."""
        if self.direction is Direction.CCW:
            return Arc(self.port - self.span, self.span)
        if self.direction is Direction.CW:
            return Arc(self.port, self.span)
        return Arc(self.port, 0.0)

    @property
    def feature_angle(self) -> float:
        if self.direction is Direction.CCW:
            return norm_angle(self.port - self.span)
        if self.direction is Direction.CW:
            return norm_angle(self.port + self.span)
        return self.port

    def bend_point(self, radius: float) -> PolarPoint:
        return PolarPoint(radius, self.port)


@dataclass(frozen=True)
class Label:
    feature: str
    start: float
    extent: float
    port: float

    def __post_init__(self):
        object.__setattr__(self, "start", norm_angle(self.start))
        object.__setattr__(self, "port", norm_angle(self.port))

    @property
    def arc(self) -> Arc:
        return Arc(self.start, self.extent)

    @property
    def ratio(self) -> float:
        """Fraction of the label from its start to the port."""
        if self.extent <= 0.0:
            return 0.0
        d = ccw_diff(self.start, self.port)
        if d > self.extent and TAU - d < ANGLE_TOL:
            d = 0.0
        return d / self.extent


@dataclass(frozen=True)
class Labeling:
    labels: tuple[Label, ...]
    leaders: tuple[Leader, ...]
    objective: float
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "leaders", tuple(self.leaders))
        object.__setattr__(
            self,
            "_by_id",
            {
                "labels": {lb.feature: lb for lb in self.labels},
                "leaders": {ld.feature: ld for ld in self.leaders},
            },
        )

    def label(self, feature_id: str) -> Label:
        return self._by_id["labels"][feature_id]

    def leader(self, feature_id: str) -> Leader:
        return self._by_id["leaders"][feature_id]


def leader_length(feature: PolarPoint | float, orbital_span: float, circumference: float) -> float:
    """Length of an orbital-radial leader: radial part ``R - r`` plus orbital ``r * span``."""
    r = feature.radius if isinstance(feature, PolarPoint) else float(feature)
    if r < 0.0:
        raise InvalidArgument(f"negative radius {r}")
    if orbital_span < 0.0:
        raise InvalidArgument(f"negative orbital span {orbital_span}")
    if orbital_span > TAU + ANGLE_TOL:
        raise InvalidArgument(f"orbital span {orbital_span} exceeds a full turn")
    return circumference / TAU - r + r * orbital_span


def make_leader(
    feature: PolarPoint,
    port: float,
    direction: Direction | str,
    *,
    feature_id: str = "",
    tol: float = ANGLE_TOL,
) -> Leader:
    """Leader from ``feature`` to ``port`` whose orbital arc runs in ``direction``."""
    direction = Direction(direction)
    if direction is Direction.RADIAL or feature.radius == 0.0:
        return Leader(feature_id, Direction.RADIAL, 0.0, port)
    if direction is Direction.CCW:
        span = ccw_diff(feature.angle, port)
    else:
        span = ccw_diff(port, feature.angle)
    if span < tol or span > TAU - tol:
        return Leader(feature_id, Direction.RADIAL, 0.0, port)
    return Leader(feature_id, direction, span, port)


def shortest_leader(feature: PolarPoint, port: float, *, feature_id: str = "", tol: float = ANGLE_TOL) -> Leader:
    """The shorter of the two leaders to ``port``; CCW when both spans equal pi."""
    ccw = make_leader(feature, port, Direction.CCW, feature_id=feature_id, tol=tol)
    cw = make_leader(feature, port, Direction.CW, feature_id=feature_id, tol=tol)
    return cw if cw.span < ccw.span - tol else ccw


def _sweeps_cross_same_radius(a: Leader, b: Leader, tol: float) -> bool:
    sa, sb = a.sweep, b.sweep
    for x in (a.port, a.feature_angle):
        if in_open_arc(x, sb.start, sb.extent, tol):
            return True
    for x in (b.port, b.feature_angle):
        if in_open_arc(x, sa.start, sa.extent, tol):
            return True
    # identical non-degenerate arcs share their interior
    return (
        sa.extent > tol
        and angles_close(sa.start, sb.start, tol)
        and abs(sa.extent - sb.extent) <= tol
    )


def leaders_cross(
    a: Leader,
    b: Leader,
    radii: Mapping[str, float],
    *,
    strict: bool = True,
    outer_radius: float | None = None,
    tol: float = ANGLE_TOL,
) -> bool:
    """Whether two orbital-radial leaders intersect anywhere but on the boundary.

    Only the radial segment of the inner feature can meet the orbital arc of
    the outer one, so the test reduces to an open-interval membership of the
    inner port. Coincident ports overlap along the shared radius.
    """
    ra, rb = radii[a.feature], radii[b.feature]
    if abs(ra - rb) <= tol * max(1.0, ra, rb):
        if strict:
            raise DegenerateInput(f"features {a.feature!r} and {b.feature!r} share radius {ra}")
        if angles_close(a.port, b.port, tol):
            return True
        return _sweeps_cross_same_radius(a, b, tol)
    inner, outer = (a, b) if ra < rb else (b, a)
    r_out = max(ra, rb)
    if angles_close(inner.port, outer.port, tol):
        # overlapping radial segments unless the outer one is a single boundary point
        return outer_radius is None or outer_radius - r_out > tol * max(1.0, outer_radius)
    sw = outer.sweep
    return in_open_arc(inner.port, sw.start, sw.extent, tol)


def crossing_pairs(
    leaders: Sequence[Leader],
    radii: Mapping[str, float],
    *,
    strict: bool = True,
    outer_radius: float | None = None,
    tol: float = ANGLE_TOL,
) -> list[tuple[str, str]]:
    """All crossing leader pairs, as feature-id tuples in input order."""
    out = []
    for i in range(len(leaders)):
        for j in range(i + 1, len(leaders)):
            if leaders_cross(leaders[i], leaders[j], radii, strict=strict, outer_radius=outer_radius, tol=tol):
                out.append((leaders[i].feature, leaders[j].feature))
    return out


def crossing_matrix(radius, port, sweep_start, sweep_extent, outer_radius: float, tol: float = ANGLE_TOL):
    """Vectorized crossing test over all pairs with distinct radii.

    Returns a boolean ``n x n`` matrix ``X`` where ``X[i, j]`` means the radial
    segment of ``i`` (the inner feature) crosses the leader of ``j``. Pairs
    with equal radii (within tolerance) are left ``False``; callers handle them.
    """
    import numpy as np

    r = np.asarray(radius, dtype=float)
    p = np.asarray(port, dtype=float)
    s0 = np.asarray(sweep_start, dtype=float)
    ext = np.asarray(sweep_extent, dtype=float)
    rtol = tol * np.maximum(1.0, np.maximum(r[:, None], r[None, :]))
    inner = r[:, None] < r[None, :] - rtol
    d = np.mod(p[:, None] - s0[None, :], TAU)
    inside = (ext[None, :] > 2 * tol) & (d > tol) & (d < ext[None, :] - tol)
    dp = np.mod(p[:, None] - p[None, :], TAU)
    same_port = (np.minimum(dp, TAU - dp) <= tol) & ((outer_radius - r[None, :]) > tol * max(1.0, outer_radius))
    return inner & (inside | same_port)
