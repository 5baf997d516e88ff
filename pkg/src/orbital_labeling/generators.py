"""Instance generators: seeded random instances and the PARTITION gadget."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from .errors import InvalidArgument
from .geometry import TAU, PolarPoint
from .instance import Feature, Instance, Mode, Ratios, Sizes, Variant

BLOCKER_MARGIN = 1.0 / (8.0 * math.pi)


def gen_random(
    seed: int,
    n: int,
    variant: Variant | None = None,
    radius_distribution: str = "stratified",
    *,
    circumference: float = TAU,
) -> Instance:
    """Random instance with pairwise distinct feature radii.

    Radii are a random permutation of the grid ``R*j/(n+1)`` ("stratified")
    or ``R*sqrt(j/(n+1))`` ("sqrt", uniform by area). A nonuniform-locked
    variant without a ratio list gets random ratios.
    """
    if n < 1:
        raise InvalidArgument("need at least one feature")
    variant = variant or Variant()
    rng = np.random.default_rng(seed)
    R = circumference / TAU
    grid = np.arange(1, n + 1) / (n + 1)
    if radius_distribution == "stratified":
        radii = R * grid
    elif radius_distribution == "sqrt":
        radii = R * np.sqrt(grid)
    else:
        raise InvalidArgument(f"unknown radius distribution {radius_distribution!r}")
    radii = rng.permutation(radii)
    angles = rng.uniform(0.0, TAU, n)
    if variant.sizes is Sizes.UNIFORM:
        lengths = np.full(n, circumference / n)
    else:
        w = rng.integers(1, 5, n).astype(float)
        lengths = w / w.sum() * circumference
    ids = [f"p{i + 1}" for i in range(n)]
    feats = tuple(Feature(ids[i], PolarPoint(float(radii[i]), float(angles[i])), float(lengths[i])) for i in range(n))
    candidates = None
    if variant.ports is Mode.LOCKED:
        m = max(n, 2 * n)
        rot = rng.uniform(0.0, TAU / m)
        candidates = tuple(float(rot + TAU * t / m) for t in range(m))
    order = None
    if variant.order is Mode.LOCKED:
        order = tuple(ids[i] for i in rng.permutation(n))
    if variant.ratios is Ratios.NONUNIFORM_LOCKED and (variant.K is None or len(variant.K) != n):
        variant = replace(variant, K=tuple(float(x) for x in rng.uniform(0.0, 1.0, n)))
    return Instance(circumference, feats, variant, candidates, order)


def gen_partition_gadget(
    X: Sequence[int],
    ratios: Ratios | str = Ratios.UNIFORM_LOCKED,
) -> tuple[Instance, float]:
    """Hardness gadget for a PARTITION instance ``X``; returns ``(instance, k)``.

    Item features sit on a tiny segment above the center, two unit-length
    blockers sit above and below it at about half the disk radius. A
    labeling shorter than ``k`` exists iff both blocker leaders can be
    straight, i.e. iff ``X`` splits into two halves of equal sum.
    """
    X = [int(x) for x in X]
    if not X or any(x < 1 for x in X):
        raise InvalidArgument("X must be a nonempty list of positive integers")
    ratios = Ratios(ratios)
    n = len(X)
    S = sum(X)
    C = float(S + 2)
    R = C / TAU
    base = (S + 2) / (4.0 * math.pi)
    r_up = base + BLOCKER_MARGIN
    # keeps the two blockers on distinct circles
    r_down = base + BLOCKER_MARGIN / 2.0
    feats = [
        Feature(f"p{i}", PolarPoint.from_cartesian(0.0, i / (4.0 * math.pi * n * n)), float(x))
        for i, x in enumerate(X, start=1)
    ]
    feats.append(Feature("pU", PolarPoint.from_cartesian(0.0, r_up), 1.0))
    feats.append(Feature("pD", PolarPoint.from_cartesian(0.0, -r_down), 1.0))
    if ratios is Ratios.UNIFORM_LOCKED:
        variant = Variant(Mode.FREE, Mode.FREE, Sizes.NONUNIFORM, ratios, k=0.5)
    elif ratios is Ratios.UNIFORM_FREE:
        variant = Variant(Mode.FREE, Mode.FREE, Sizes.NONUNIFORM, ratios)
    elif ratios is Ratios.NONUNIFORM_LOCKED:
        variant = Variant(Mode.FREE, Mode.FREE, Sizes.NONUNIFORM, ratios, K=tuple([0.25] * n + [0.5, 0.5]))
    else:
        raise InvalidArgument("the gadget needs ratios that force equal blocker ratios")
    inst = Instance(C, tuple(feats), variant)
    l_radial = math.fsum(R - f.r for f in feats)
    return inst, 0.5 + l_radial
