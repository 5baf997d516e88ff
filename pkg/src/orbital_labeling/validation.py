"""Feasibility checks for instances and labelings.

Nothing here raises on bad input: every problem becomes a ``Violation`` in
the returned report so callers can list them all at once.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ANGLE_TOL,
    LENGTH_TOL,
    TAU,
    Direction,
    Labeling,
    angles_close,
    ccw_diff,
    crossing_matrix,
    leader_length,
    leaders_cross,
)
from .instance import Instance, Mode, Ratios, Sizes


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    features: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str, *features: str) -> None:
        self.violations.append(Violation(kind, message, tuple(features)))

    def kinds(self) -> Counter:
        return Counter(v.kind for v in self.violations)

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def summary(self) -> str:
        lines = [f"[{v.kind}] {v.message}" for v in self.violations]
        lines += [f"[warning] {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


def equal_radius_pairs(instance: Instance, tol: float = ANGLE_TOL) -> list[tuple[str, str]]:
    feats = sorted(instance.features, key=lambda f: f.r)
    out = []
    for a, b in zip(feats, feats[1:]):
        if abs(a.r - b.r) <= tol * max(1.0, b.r):
            out.append((a.id, b.id))
    return out


def validate_instance(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> ValidationReport:
    rep = ValidationReport()
    C = instance.circumference
    v = instance.variant
    if not (C > 0.0 and math.isfinite(C)):
        rep.add("malformed", f"circumference must be positive, got {C}")
        return rep
    if instance.n == 0:
        rep.add("malformed", "instance has no features")
        return rep
    dup = [fid for fid, c in Counter(instance.ids).items() if c > 1]
    if dup:
        rep.add("malformed", f"duplicate feature ids {dup}", *dup)
    for f in instance.features:
        if not f.length > 0.0:
            rep.add("size", f"label length of {f.id!r} must be positive", f.id)
    total = sum(f.length for f in instance.features)
    if abs(total - C) > LENGTH_TOL * C:
        rep.add("tiling", f"label lengths sum to {total!r}, circumference is {C!r}")
    if v.sizes is Sizes.UNIFORM:
        lam0 = instance.features[0].length
        if any(abs(f.length - lam0) > LENGTH_TOL * C for f in instance.features):
            rep.add("size", "variant declares uniform sizes but label lengths differ")
    R = instance.disk_radius
    for f in instance.features:
        if f.r > R * (1.0 + tol):
            rep.add("outside", f"feature {f.id!r} at radius {f.r} lies outside the disk (R={R})", f.id)
    for a, b in equal_radius_pairs(instance, tol):
        msg = f"features {a!r} and {b!r} share a radius"
        if strict:
            rep.add("degenerate", msg, a, b)
        else:
            rep.warnings.append(msg + "; the crossing-free guarantee for minimal labelings is void")
    if v.ports is Mode.LOCKED:
        cands = instance.candidates or ()
        if len(cands) < instance.n:
            rep.add("infeasible-candidates", f"{len(cands)} candidates for {instance.n} features")
        for a, b in zip(cands, cands[1:] + cands[:1]):
            if len(cands) > 1 and angles_close(a, b, tol):
                rep.add("malformed", f"candidate angles {a} and {b} coincide")
                break
    elif instance.candidates is not None:
        rep.warnings.append("candidates given but ports are free; they are ignored")
    if v.order is Mode.LOCKED:
        if instance.order is None or sorted(instance.order) != sorted(instance.ids) or len(set(instance.order)) != instance.n:
            rep.add("malformed", "locked order must be a permutation of all feature ids")
    elif instance.order is not None:
        rep.warnings.append("order given but the variant has a free order; it is ignored")
    if v.ratios is Ratios.NONUNIFORM_LOCKED and (v.K is None or len(v.K) != instance.n):
        rep.add("malformed", f"K has {len(v.K or ())} ratios for {instance.n} features")
    return rep


def total_leader_length(labeling: Labeling, instance: Instance) -> float:
    radii = instance.radii
    C = instance.circumference
    return math.fsum(leader_length(radii[ld.feature], ld.span, C) for ld in labeling.leaders)


def _check_tiling(instance: Instance, labeling: Labeling, rep: ValidationReport, tol: float, as_warning: bool):
    found = []
    labels = sorted(labeling.labels, key=lambda lb: lb.start)
    total = math.fsum(lb.extent for lb in labels)
    if abs(total - TAU) > tol * max(1, len(labels)):
        kind = "gap" if total < TAU else "overlap"
        found.append((kind, f"label arcs sum to {total:.12g} rad instead of a full turn", ()))
    if len(labels) > 1:
        for a, b in zip(labels, labels[1:] + labels[:1]):
            d = norm_signed(b.start - (a.start + a.extent))
            if d > tol:
                found.append(("gap", f"gap of {d:.3g} rad between labels of {a.feature!r} and {b.feature!r}", (a.feature, b.feature)))
            elif d < -tol:
                found.append(("overlap", f"labels of {a.feature!r} and {b.feature!r} overlap by {-d:.3g} rad", (a.feature, b.feature)))
    for kind, msg, feats in found:
        if as_warning:
            rep.warnings.append(f"{kind}: {msg}")
        else:
            rep.add("tiling", f"{kind}: {msg}", *feats)


def norm_signed(x: float) -> float:
    """Angle mapped into ``(-pi, pi]``."""
    y = math.fmod(x, TAU)
    if y > math.pi:
        y -= TAU
    elif y <= -math.pi:
        y += TAU
    return y


def _cyclic_sequence(labeling: Labeling) -> list[str]:
    return [lb.feature for lb in sorted(labeling.labels, key=lambda lb: lb.start)]


def is_cyclic_rotation(seq: list[str], ref: tuple[str, ...]) -> bool:
    if len(seq) != len(ref):
        return False
    if not seq:
        return True
    try:
        k = ref.index(seq[0])
    except ValueError:
        return False
    return all(seq[i] == ref[(k + i) % len(ref)] for i in range(len(seq)))


def validate_labeling(
    instance: Instance,
    labeling: Labeling,
    *,
    strict: bool = True,
    tol: float = ANGLE_TOL,
) -> ValidationReport:
    """Check a labeling against every feasibility rule of the instance's variant.

    With locked ports and a free order, label tiling problems are reported as
    warnings: that variant's feasibility only concerns ports and leaders.
    """
    rep = ValidationReport()
    ids = set(instance.ids)
    C = instance.circumference
    R = instance.disk_radius
    v = instance.variant
    lab_ids = [lb.feature for lb in labeling.labels]
    led_ids = [ld.feature for ld in labeling.leaders]
    structural = False
    for name, got in (("label", lab_ids), ("leader", led_ids)):
        cnt = Counter(got)
        for fid in ids:
            if cnt[fid] != 1:
                rep.add("structure", f"feature {fid!r} has {cnt[fid]} {name}s", fid)
                structural = True
        for fid in cnt:
            if fid not in ids:
                rep.add("structure", f"{name} references unknown feature {fid!r}", fid)
                structural = True
    if structural:
        return rep

    feats = {f.id: f for f in instance.features}
    idx = instance.index_of()

    for lb in labeling.labels:
        lam = feats[lb.feature].length
        if abs(lb.extent * R - lam) > LENGTH_TOL * C:
            rep.add("size", f"label of {lb.feature!r} has length {lb.extent * R!r}, expected {lam!r}", lb.feature)

    _check_tiling(instance, labeling, rep, tol, as_warning=(v.ports is Mode.LOCKED and v.order is Mode.FREE))

    # ports and ratios
    ratios = {}
    for lb in labeling.labels:
        if not lb.arc.contains(lb.port, tol):
            rep.add("port", f"port of {lb.feature!r} lies off its label", lb.feature)
            continue
        ratios[lb.feature] = lb.ratio
    for fid, rho in ratios.items():
        want = instance.locked_ratio(idx[fid])
        ext = labeling.label(fid).extent
        if want is not None and abs(rho - want) * ext > tol:
            rep.add("ratio", f"port ratio of {fid!r} is {rho:.12g}, locked to {want:.12g}", fid)
    if v.ratios is Ratios.UNIFORM_FREE and ratios:
        ref_id = instance.ids[0] if instance.ids[0] in ratios else next(iter(ratios))
        ref = ratios[ref_id]
        for fid, rho in ratios.items():
            if abs(rho - ref) * labeling.label(fid).extent > tol:
                rep.add("ratio", f"port ratios are not uniform ({fid!r}: {rho:.12g} vs {ref:.12g})", fid, ref_id)

    if v.order is Mode.LOCKED and instance.order is not None:
        seq = _cyclic_sequence(labeling)
        if not is_cyclic_rotation(seq, instance.order):
            rep.add("order", f"cyclic label order {seq} differs from locked order {list(instance.order)}")

    if v.ports is Mode.LOCKED:
        cands = np.asarray(instance.candidates or (), dtype=float)
        for ld in labeling.leaders:
            if cands.size == 0:
                ok = False
            else:
                d = np.mod(cands - ld.port, TAU)
                ok = bool(np.min(np.minimum(d, TAU - d)) <= tol)
            if not ok:
                rep.add("candidate", f"port of {ld.feature!r} at {ld.port!r} is not a candidate", ld.feature)

    # leaders agree with labels and features
    for ld in labeling.leaders:
        f = feats[ld.feature]
        if not angles_close(ld.port, labeling.label(ld.feature).port, tol):
            rep.add("leader", f"leader and label of {ld.feature!r} disagree on the port", ld.feature)
        if ld.direction is Direction.RADIAL and ld.span > tol:
            rep.add("leader", f"radial leader of {ld.feature!r} has orbital span {ld.span}", ld.feature)
        if ld.direction is not Direction.RADIAL and not ld.span > 0.0:
            rep.add("leader", f"orbital leader of {ld.feature!r} has empty span", ld.feature)
        if not 0.0 <= ld.span < TAU:
            rep.add("leader", f"orbital span of {ld.feature!r} out of range", ld.feature)
        if f.r > 0.0 and not angles_close(ld.feature_angle, f.angle, tol * 10):
            rep.add("leader", f"leader of {ld.feature!r} does not start at its feature", ld.feature)

    # crossings
    eq_pairs = equal_radius_pairs(instance, tol)
    if eq_pairs:
        msg = "equal radii present; minimal labelings need not be crossing-free"
        if strict:
            for a, b in eq_pairs:
                rep.add("degenerate", f"features {a!r} and {b!r} share a radius", a, b)
        else:
            rep.warnings.append(msg)
    leaders = [labeling.leader(fid) for fid in instance.ids]
    radii = np.array([f.r for f in instance.features])
    ports = np.array([ld.port for ld in leaders])
    sw = [ld.sweep for ld in leaders]
    X = crossing_matrix(radii, ports, [a.start for a in sw], [a.extent for a in sw], R, tol)
    pairs = set()
    for i, j in zip(*np.nonzero(X)):
        pairs.add((min(i, j), max(i, j)))
    rmap = instance.radii
    for a, b in eq_pairs:
        if leaders_cross(labeling.leader(a), labeling.leader(b), rmap, strict=False, outer_radius=R, tol=tol):
            i, j = idx[a], idx[b]
            pairs.add((min(i, j), max(i, j)))
    for i, j in sorted(pairs):
        a, b = instance.ids[i], instance.ids[j]
        rep.add("crossing", f"leaders of {a!r} and {b!r} cross", a, b)

    total = total_leader_length(labeling, instance)
    if abs(total - labeling.objective) > LENGTH_TOL * C:
        rep.add("objective", f"stored objective {labeling.objective!r} differs from leader total {total!r}")
    return rep


__all__ = [
    "ValidationReport",
    "Violation",
    "ccw_diff",
    "equal_radius_pairs",
    "is_cyclic_rotation",
    "total_leader_length",
    "validate_instance",
    "validate_labeling",
]
