"""Exact solver for free ports and free order with uniform label sizes.

In an optimal labeling some radius of the disk is crossed by no leader, and
the ports form an equally spaced set that contains a point in line with a
feature. So we enumerate those port sets and every choice of port for the
innermost feature. Cutting the circle along that feature's radial segment
leaves each other leader a single non-crossing route to any port. What
remains is a plain assignment of features to ports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedVariant
from .geometry import (
    ANGLE_TOL,
    LENGTH_TOL,
    TAU,
    Direction,
    Label,
    Labeling,
    Leader,
    crossing_matrix,
    in_open_arc,
    leader_length,
    leaders_cross,
    make_leader,
    norm_angle,
)
from .instance import Instance, Mode, Ratios, Sizes
from .matching import min_cost_assignment
from .report import INFEASIBLE, OPTIMAL, SolveReport, require_valid


@dataclass(frozen=True)
class AnchorSet:
    anchors: tuple[float, ...]
    ports_per_anchor: tuple[tuple[float, ...], ...]

    @property
    def spacing(self) -> float:
        n = len(self.ports_per_anchor[0]) if self.ports_per_anchor else 1
        return TAU / n

    def __len__(self) -> int:
        return sum(len(p) for p in self.ports_per_anchor)

    def pairs(self):
        """``(anchor, innermost port, full port set)`` in tie-break order."""
        for a, ports in zip(self.anchors, self.ports_per_anchor):
            for p in sorted(ports):
                yield a, p, ports


def equally_spaced(anchor: float, n: int) -> tuple[float, ...]:
    return tuple(norm_angle(anchor + j * TAU / n) for j in range(n))


def innermost_port_candidates(instance: Instance, extra_anchors=(), *, tol: float = ANGLE_TOL) -> AnchorSet:
    """Anchors in line with each feature (both ends of the line) and their port sets."""
    pts = []
    for f in instance.features:
        if f.r > 0.0:
            pts += [f.angle, norm_angle(f.angle + math.pi)]
    pts += [norm_angle(a) for a in extra_anchors]
    if not pts:
        pts = [0.0]
    anchors: list[float] = []
    for a in sorted(pts):
        if anchors and a - anchors[-1] <= tol:
            continue
        anchors.append(a)
    if len(anchors) > 1 and anchors[0] + TAU - anchors[-1] <= tol:
        anchors.pop()
    n = instance.n
    return AnchorSet(tuple(anchors), tuple(equally_spaced(a, n) for a in anchors))


@dataclass
class CostMatrix:
    cut: float
    rows: tuple[str, ...]
    cols: tuple[float, ...]
    cost: np.ndarray
    directions: np.ndarray  # +1 ccw, -1 cw, 0 radial, per entry


def _cut_offsets(x, cut):
    return np.mod(np.asarray(x, dtype=float) - cut, TAU)


def reduce_to_assignment(
    instance: Instance,
    cut: float,
    port_set,
    *,
    tol: float = ANGLE_TOL,
) -> CostMatrix:
    """Leader-length matrix for all non-innermost features against all ports but ``cut``.

    Each leader is routed so its orbital arc never passes the cut angle.
    A feature lying exactly on the cut may leave on either side; it takes the
    shorter one, CCW on ties.
    """
    inner = instance.innermost()
    rows = [i for i in range(instance.n) if i != inner]
    ports = np.array(sorted(p for p in port_set if abs(math.remainder(p - cut, TAU)) > tol))
    R = instance.disk_radius
    r = np.array([instance.features[i].r for i in rows])
    alpha = np.array([instance.features[i].angle for i in rows])
    oa = _cut_offsets(alpha, cut)
    on_cut = (oa <= tol) | (oa >= TAU - tol)
    oa = np.where(on_cut, 0.0, oa)
    ov = _cut_offsets(ports, cut)
    diff = ov[None, :] - oa[:, None]
    span = np.abs(diff)
    dirs = np.sign(diff).astype(int)
    # the other way round from the cut itself
    back = TAU - ov[None, :]
    use_back = on_cut[:, None] & (back < span - tol)
    span = np.where(use_back, back, span)
    dirs = np.where(use_back, -1, dirs)
    dirs = np.where(span <= tol, 0, dirs)
    span = np.where(span <= tol, 0.0, span)
    cost = R - r[:, None] + r[:, None] * span
    return CostMatrix(cut, tuple(instance.ids[i] for i in rows), tuple(float(p) for p in ports), cost, dirs)


def _check_variant(instance: Instance) -> None:
    v = instance.variant
    if v.ports is not Mode.FREE or v.order is not Mode.FREE or v.sizes is not Sizes.UNIFORM:
        raise UnsupportedVariant(f"needs free ports, free order and uniform sizes, got {v.describe()}")
    if v.ratios not in (Ratios.UNIFORM_LOCKED, Ratios.UNIFORM_FREE):
        raise UnsupportedVariant(f"needs a uniform port ratio, got {v.ratios.value}")


@dataclass
class _Candidate:
    objective: float
    key: tuple
    inner_leader: Leader
    matrix: CostMatrix
    cols: tuple[int, ...]
    assignment_cost: float


def _build_labeling(instance: Instance, cand: _Candidate, tol: float) -> Labeling:
    k = instance.variant.k if instance.variant.ratios is Ratios.UNIFORM_LOCKED else 0.0
    w = TAU / instance.n
    m = cand.matrix
    by_id: dict[str, tuple[float, Leader]] = {}
    inner = instance.features[instance.innermost()]
    by_id[inner.id] = (cand.inner_leader.port, cand.inner_leader)
    for row, (fid, col) in enumerate(zip(m.rows, cand.cols)):
        port = m.cols[col]
        code = int(m.directions[row, col])
        d = Direction.RADIAL if code == 0 else (Direction.CCW if code > 0 else Direction.CW)
        ld = make_leader(instance.feature(fid).point, port, d, feature_id=fid, tol=tol)
        by_id[fid] = (port, ld)
    labels = [Label(fid, by_id[fid][0] - k * w, w, by_id[fid][0]) for fid in instance.ids]
    leaders = [by_id[fid][1] for fid in instance.ids]
    return Labeling(labels, leaders, cand.objective)


def _crossings(instance: Instance, lab: Labeling, strict: bool, tol: float) -> list[tuple[str, str]]:
    ids = instance.ids
    r = np.array([f.r for f in instance.features])
    lds = lab.leaders
    ports = np.array([ld.port for ld in lds])
    s0 = np.array([ld.sweep.start for ld in lds])
    ext = np.array([ld.sweep.extent for ld in lds])
    X = crossing_matrix(r, ports, s0, ext, instance.disk_radius, tol)
    out = [(ids[a], ids[b]) for a, b in zip(*np.nonzero(X))]
    if not strict:
        radii = instance.radii
        for a in range(len(lds)):
            for b in range(a + 1, len(lds)):
                if abs(r[a] - r[b]) <= tol * max(1.0, r[a], r[b]) and leaders_cross(
                    lds[a], lds[b], radii, strict=False, outer_radius=instance.disk_radius, tol=tol
                ):
                    out.append((ids[a], ids[b]))
    return out


def solve_free_order_uniform(
    instance: Instance,
    *,
    strict: bool = True,
    tol: float = ANGLE_TOL,
    extra_anchors=(),
) -> SolveReport:
    """Minimum total leader length over all orders and port positions."""
    _check_variant(instance)
    require_valid(instance, strict=strict, tol=tol)
    C = instance.circumference
    anchors = innermost_port_candidates(instance, extra_anchors, tol=tol)
    inner = instance.features[instance.innermost()]
    seen: set[tuple] = set()
    cands: list[_Candidate] = []
    for anchor, xi, ports in anchors.pairs():
        # anchors a whole spacing apart give the same port set
        sig = (round(norm_angle(xi) / tol), tuple(sorted(round(p / tol) for p in ports)))
        if sig in seen:
            continue
        mat = reduce_to_assignment(instance, xi, ports, tol=tol)
        cols, cost = min_cost_assignment(mat.cost)
        seen.add(sig)
        for rank, d in enumerate((Direction.CCW, Direction.CW)):
            ld = make_leader(inner.point, xi, d, feature_id=inner.id, tol=tol)
            total = leader_length(inner.r, ld.span, C) + cost
            cands.append(_Candidate(total, (anchor, xi, rank), ld, mat, cols, cost))
    if not cands:
        return SolveReport(INFEASIBLE, solver="free-order-matching", diagnostics=["no port candidates"])
    best = min(c.objective for c in cands)
    near = sorted((c for c in cands if c.objective <= best + LENGTH_TOL * C), key=lambda c: c.key)
    diags: list[str] = []
    for c in near:
        lab = _build_labeling(instance, c, tol)
        crossing = _crossings(instance, lab, strict, tol)
        if not crossing:
            return SolveReport(
                OPTIMAL,
                lab,
                lab.objective,
                solver="free-order-matching",
                diagnostics=diags,
                details={
                    "anchor": c.key[0],
                    "innermost_port": c.key[1],
                    "innermost_direction": c.inner_leader.direction.value,
                    "subproblems": len(cands),
                    "assignment_cost": c.assignment_cost,
                },
            )
        diags.append(f"tied candidate at anchor {c.key[0]:.6f} has crossings {crossing}")
    raise AssertionError("minimum-length labeling contains crossings: " + "; ".join(diags))


def splitting_radius(labeling: Labeling, tol: float = ANGLE_TOL) -> float | None:
    """An angle whose radius meets no leader, if one exists."""
    pts = []
    for ld in labeling.leaders:
        pts += [ld.port, ld.feature_angle]
    pts = sorted(set(pts))
    gaps = zip(pts, pts[1:] + [pts[0] + TAU])
    for a, b in gaps:
        if b - a <= 2 * tol:
            continue
        mid = norm_angle((a + b) / 2)
        if not any(in_open_arc(mid, ld.sweep.start, ld.sweep.extent, tol) for ld in labeling.leaders):
            return mid
    return None
