"""Solvers for ports restricted to a finite candidate set."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedVariant
from .geometry import (
    ANGLE_TOL,
    TAU,
    Direction,
    Label,
    Labeling,
    circ_dist,
    crossing_matrix,
    leader_length,
    make_leader,
    norm_angle,
)
from .instance import Instance, Mode, Ratios, Sizes
from .matching import min_cost_assignment
from .report import INFEASIBLE, OPTIMAL, SolveReport, require_valid
from .rotation import _check_variant as _check_locked_order
from .rotation import _configure, _labeling, locked_order_frame, verify_configuration


@dataclass(frozen=True)
class CandidateIndex:
    angles: tuple[float, ...]
    tol: float = ANGLE_TOL

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(sorted(norm_angle(a) for a in self.angles)))

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def spacing(self) -> float | None:
        """Common gap when the candidates are equally spaced, else None."""
        m = len(self.angles)
        if m < 2:
            return None
        step = TAU / m
        if all(abs(self.angles[i] - self.angles[0] - i * step) <= self.tol for i in range(m)):
            return step
        return None

    def successor(self, x: float) -> int:
        """Index of the first candidate at or after ``x`` (cyclically)."""
        i = bisect.bisect_left(self.angles, norm_angle(x) - self.tol)
        return i % len(self.angles)

    def predecessor(self, x: float) -> int:
        i = bisect.bisect_right(self.angles, norm_angle(x) + self.tol)
        return (i - 1) % len(self.angles)

    def find(self, x: float) -> int | None:
        """Index of a candidate within tolerance of ``x``."""
        if not self.angles:
            return None
        for i in (self.successor(x), self.predecessor(x)):
            if circ_dist(self.angles[i], x) <= self.tol:
                return i
        return None


def _port_indices(index: CandidateIndex, first: int, offsets: np.ndarray, ports: np.ndarray):
    """Candidate index for each port, or None where a port misses every candidate."""
    step = index.spacing
    out = []
    if step is not None:
        m = len(index)
        for off in offsets:
            q = off / step
            j = round(q)
            out.append((first + j) % m if abs(q - j) * step <= index.tol else None)
        return out
    return [index.find(float(p)) for p in ports]


def solve_locked_order_locked_ports(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    """Try every candidate as the port of the first label in the locked order."""
    _check_locked_order(instance, Mode.LOCKED)
    require_valid(instance, strict=strict, tol=tol, allow=("infeasible-candidates",))
    index = CandidateIndex(instance.candidates or (), tol)
    if len(index) < instance.n:
        return SolveReport(
            INFEASIBLE,
            solver="locked-candidates-order",
            diagnostics=[f"{len(index)} candidates for {instance.n} features"],
        )
    fr = locked_order_frame(instance)
    ids = instance.ids
    phis = np.array(index.angles)
    rejections: list[tuple[float, str, str]] = []
    best = None
    for d in (1, -1):
        dname = "ccw" if d == 1 else "cw"
        ports, codes, spans = _configure(fr, phis, d, tol)
        for c, phi in enumerate(index.angles):
            idx = _port_indices(index, c, fr.delta, ports[c])
            missing = [ids[i] for i, j in enumerate(idx) if j is None]
            if missing:
                rejections.append((phi, dname, f"port of {missing[0]!r} is not a candidate"))
                continue
            if len(set(idx)) < len(idx):
                rejections.append((phi, dname, "two ports share a candidate"))
                continue
            crossing = verify_configuration(fr, ports[c], codes[c], spans[c], tol)
            if crossing:
                a, b = crossing[0]
                rejections.append((phi, dname, f"leaders of {ids[a]!r} and {ids[b]!r} cross"))
                continue
            lab = _labeling(fr, phi, ports[c], codes[c], spans[c])
            # candidates are visited in angle order, CCW pass first
            if best is None or lab.objective < best[0].objective - 1e-9 * fr.C or (
                lab.objective <= best[0].objective + 1e-9 * fr.C and phi < best[1]
            ):
                best = (lab, phi, dname)
    details = {"rejections": rejections, "trials": 2 * len(index)}
    if best is None:
        return SolveReport(
            INFEASIBLE,
            solver="locked-candidates-order",
            diagnostics=["no candidate placement is crossing-free with all ports on candidates"],
            details=details,
        )
    lab, phi, dname = best
    details.update(rotation=phi, innermost_direction=dname)
    return SolveReport(OPTIMAL, lab, lab.objective, solver="locked-candidates-order", details=details)


def port_weights(instance: Instance, candidates) -> tuple[np.ndarray, np.ndarray]:
    """Shorter-leader length from every feature to every candidate, and its direction (+1 ccw, -1 cw)."""
    R = instance.disk_radius
    r = np.array([f.r for f in instance.features])
    alpha = np.array([f.angle for f in instance.features])
    c = np.asarray(candidates, dtype=float)
    ccw = np.mod(c[None, :] - alpha[:, None], TAU)
    cw = TAU - ccw
    use_ccw = ccw <= cw
    span = np.where(use_ccw, ccw, cw)
    return R - r[:, None] + r[:, None] * span, np.where(use_ccw, 1, -1)


def label_overlaps(labels, tol: float = ANGLE_TOL) -> list[str]:
    """Describe every pair of cyclically adjacent labels that overlap."""
    srt = sorted(labels, key=lambda lb: lb.start)
    out = []
    for a, b in zip(srt, srt[1:] + srt[:1]):
        if a is b:
            continue
        gap = norm_angle(b.start - a.start)
        if gap < a.extent - tol:
            out.append(f"labels of {a.feature!r} and {b.feature!r} overlap by {a.extent - gap:.6g} rad")
    return out


def solve_free_order_locked_ports(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    """Min-cost matching of features to candidate ports."""
    v = instance.variant
    if v.ports is not Mode.LOCKED or v.order is not Mode.FREE or v.sizes is not Sizes.UNIFORM:
        raise UnsupportedVariant(f"needs locked ports, free order and uniform sizes, got {v.describe()}")
    if v.ratios not in (Ratios.UNIFORM_LOCKED, Ratios.UNIFORM_FREE):
        raise UnsupportedVariant(f"needs a uniform port ratio, got {v.ratios.value}")
    require_valid(instance, strict=strict, tol=tol, allow=("infeasible-candidates",))
    cands = np.array(instance.candidates or (), dtype=float)
    n = instance.n
    if n > cands.size:
        return SolveReport(
            INFEASIBLE, solver="locked-candidates-matching", diagnostics=[f"{cands.size} candidates for {n} features"]
        )
    W, dirs = port_weights(instance, cands)
    cols, cost = min_cost_assignment(W)
    k = v.k if v.ratios is Ratios.UNIFORM_LOCKED else 0.5
    R = instance.disk_radius
    labels, leaders = [], []
    for i, f in enumerate(instance.features):
        port = float(cands[cols[i]])
        d = Direction.CCW if dirs[i, cols[i]] > 0 else Direction.CW
        ld = make_leader(f.point, port, d, feature_id=f.id, tol=tol)
        w = f.length / R
        labels.append(Label(f.id, port - k * w, w, port))
        leaders.append(ld)
    total = math.fsum(leader_length(f.r, ld.span, instance.circumference) for f, ld in zip(instance.features, leaders))
    lab = Labeling(labels, leaders, total)
    diags = label_overlaps(labels, tol)
    r = np.array([f.r for f in instance.features])
    X = crossing_matrix(
        r,
        [ld.port for ld in leaders],
        [ld.sweep.start for ld in leaders],
        [ld.sweep.extent for ld in leaders],
        R,
        tol,
    )
    crossing = [(instance.ids[a], instance.ids[b]) for a, b in zip(*np.nonzero(X))]
    if crossing:
        diags.append(f"matched leaders cross: {crossing}")
    return SolveReport(
        OPTIMAL,
        lab,
        total,
        solver="locked-candidates-matching",
        diagnostics=diags,
        details={"matching": {fid: int(cols[i]) for i, fid in enumerate(instance.ids)}, "matching_cost": cost},
    )
