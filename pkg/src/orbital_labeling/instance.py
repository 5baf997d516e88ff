"""Problem variants and instances.

A variant fixes four independent dimensions: whether port candidates are
locked, whether the cyclic label order is locked, whether label sizes are
uniform, and how port ratios are constrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .errors import InvalidArgument
from .geometry import TAU, PolarPoint, norm_angle


class Mode(str, Enum):
    FREE = "free"
    LOCKED = "locked"


class Sizes(str, Enum):
    UNIFORM = "uniform"
    NONUNIFORM = "nonuniform"


class Ratios(str, Enum):
    UNIFORM_LOCKED = "uniform-locked"
    UNIFORM_FREE = "uniform-free"
    NONUNIFORM_LOCKED = "nonuniform-locked"
    NONUNIFORM_FREE = "nonuniform-free"


@dataclass(frozen=True)
class Variant:
    ports: Mode = Mode.FREE
    order: Mode = Mode.FREE
    sizes: Sizes = Sizes.UNIFORM
    ratios: Ratios = Ratios.UNIFORM_LOCKED
    k: float | None = None
    K: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "ports", Mode(self.ports))
        object.__setattr__(self, "order", Mode(self.order))
        object.__setattr__(self, "sizes", Sizes(self.sizes))
        object.__setattr__(self, "ratios", Ratios(self.ratios))
        if self.ratios is Ratios.UNIFORM_LOCKED:
            k = 0.5 if self.k is None else float(self.k)
            if not 0.0 <= k <= 1.0:
                raise InvalidArgument(f"locked ratio k={k} outside [0, 1]")
            object.__setattr__(self, "k", k)
        else:
            object.__setattr__(self, "k", None)
        if self.ratios is Ratios.NONUNIFORM_LOCKED:
            if self.K is None:
                # left open for generators to fill in; validate_instance flags it
                return
            K = tuple(float(x) for x in self.K)
            if any(not 0.0 <= x <= 1.0 for x in K):
                raise InvalidArgument("every ratio in K must lie in [0, 1]")
            object.__setattr__(self, "K", K)
        else:
            object.__setattr__(self, "K", None)

    @property
    def ratios_locked(self) -> bool:
        return self.ratios in (Ratios.UNIFORM_LOCKED, Ratios.NONUNIFORM_LOCKED)

    def describe(self) -> str:
        return f"ports={self.ports.value} order={self.order.value} sizes={self.sizes.value} ratios={self.ratios.value}"


@dataclass(frozen=True)
class Feature:
    id: str
    point: PolarPoint
    length: float

    @property
    def r(self) -> float:
        return self.point.radius

    @property
    def angle(self) -> float:
        return self.point.angle


@dataclass(frozen=True)
class Instance:
    circumference: float
    features: tuple[Feature, ...]
    variant: Variant = field(default_factory=Variant)
    candidates: tuple[float, ...] | None = None
    order: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "circumference", float(self.circumference))
        object.__setattr__(self, "features", tuple(self.features))
        if self.candidates is not None:
            object.__setattr__(self, "candidates", tuple(sorted(norm_angle(c) for c in self.candidates)))
        if self.order is not None:
            object.__setattr__(self, "order", tuple(str(x) for x in self.order))

    @property
    def n(self) -> int:
        return len(self.features)

    @property
    def disk_radius(self) -> float:
        return self.circumference / TAU

    @property
    def ids(self) -> list[str]:
        return [f.id for f in self.features]

    @property
    def radii(self) -> dict[str, float]:
        return {f.id: f.r for f in self.features}

    def feature(self, fid: str) -> Feature:
        for f in self.features:
            if f.id == fid:
                return f
        raise KeyError(fid)

    def index_of(self) -> dict[str, int]:
        return {f.id: i for i, f in enumerate(self.features)}

    def innermost(self) -> int:
        """Index of the feature closest to the center (first on ties)."""
        return min(range(self.n), key=lambda i: (self.features[i].r, i))

    def locked_ratio(self, i: int) -> float | None:
        """Locked port ratio of feature ``i`` in instance order, if any."""
        v = self.variant
        if v.ratios is Ratios.UNIFORM_LOCKED:
            return v.k
        if v.ratios is Ratios.NONUNIFORM_LOCKED:
            if v.K is None:
                raise InvalidArgument("nonuniform-locked variant has no ratio list")
            return v.K[i]
        return None

    def effective_ratios(self) -> list[float]:
        """Per-feature ratios a solver should use.

        Free uniform ratios collapse to 0, which is only exact when all label
        sizes are equal; callers check that precondition.
        """
        if self.variant.ratios is Ratios.UNIFORM_FREE:
            return [0.0] * self.n
        return [self.locked_ratio(i) for i in range(self.n)]

    def with_variant(self, **changes) -> "Instance":
        from dataclasses import replace

        return replace(self, variant=replace(self.variant, **changes))


def make_instance(
    circumference: float,
    features: Sequence[tuple[str, float, float, float]],
    variant: Variant | None = None,
    candidates: Sequence[float] | None = None,
    order: Sequence[str] | None = None,
) -> Instance:
    """Build an instance from ``(id, radius, angle, length)`` tuples."""
    feats = tuple(Feature(str(fid), PolarPoint(r, a), float(lam)) for fid, r, a, lam in features)
    return Instance(
        circumference,
        feats,
        variant or Variant(),
        tuple(candidates) if candidates is not None else None,
        tuple(order) if order is not None else None,
    )
