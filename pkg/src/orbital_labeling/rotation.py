"""Exact solver for free ports with a locked cyclic label order.

With the order and port ratios fixed, every port sits at a constant offset
from the port of the first label in the order, so a single rotation angle
``phi`` (that first port's position) describes the whole labeling. The
innermost feature's radial segment decides the orbital direction of every
other leader, since each leader must avoid it.

For a pair of non-innermost features ``i`` (inner) and ``j`` (outer) the
leaders cross exactly when ``alpha_j`` lies strictly inside the arc between
the ports of ``i`` and of the innermost feature that avoids the port of
``j``. Seen as a function of ``phi`` that forbidden set is one open arc, so
each pair's admissible range is a single closed arc. The total length is
piecewise linear in ``phi`` with breakpoints where a port passes its own
feature or where the innermost port passes a feature. Its minimum over the
feasible set is attained at a breakpoint or at an end of a feasible arc.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibleRangeError, InvalidArgument, UnsupportedVariant
from .geometry import (
    ANGLE_TOL,
    LENGTH_TOL,
    TAU,
    Direction,
    Label,
    Labeling,
    Leader,
    ccw_diff,
    crossing_matrix,
    leaders_cross,
    norm_angle,
)
from .instance import Instance, Mode, Ratios, Sizes
from .report import INFEASIBLE, OPTIMAL, SolveReport, require_valid

log = logging.getLogger(__name__)

_CODE = {1: Direction.CCW, -1: Direction.CW, 0: Direction.RADIAL}


@dataclass(frozen=True)
class CircleInterval:
    """Closed ccw arc ``[start, start + extent]``; ``empty`` marks the empty set."""

    start: float
    extent: float
    empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "start", norm_angle(self.start))
        object.__setattr__(self, "extent", min(max(self.extent, 0.0), TAU))

    @classmethod
    def full(cls) -> "CircleInterval":
        return cls(0.0, TAU)

    @classmethod
    def nothing(cls) -> "CircleInterval":
        return cls(0.0, 0.0, empty=True)

    @property
    def is_full(self) -> bool:
        return not self.empty and self.extent >= TAU

    def contains(self, x: float, tol: float = ANGLE_TOL) -> bool:
        if self.empty:
            return False
        if self.is_full:
            return True
        d = ccw_diff(self.start, x)
        return d <= self.extent + tol or d >= TAU - tol

    def intersect(self, other: "CircleInterval") -> list["CircleInterval"]:
        """Intersection on the circle; two arcs can meet in up to two pieces."""
        if self.empty or other.empty:
            return []
        if self.is_full:
            return [other]
        if other.is_full:
            return [self]
        out = []
        for a, b in ((self, other), (other, self)):
            d = ccw_diff(a.start, b.start)
            if d <= a.extent:
                ext = min(b.extent, a.extent - d)
                piece = CircleInterval(b.start, ext)
                if not any(abs(ccw_diff(p.start, piece.start)) < 1e-15 and p.extent == piece.extent for p in out):
                    out.append(piece)
        return out


@dataclass(frozen=True)
class Configuration:
    rotation: float
    innermost_direction: Direction
    ports: tuple[float, ...]
    directions: tuple[Direction, ...]
    spans: tuple[float, ...]


class _Frame:
    """Per-instance constants for a rigidly rotating label placement."""

    def __init__(self, instance: Instance, ratios: list[float]):
        feats = instance.features
        self.instance = instance
        self.n = n = instance.n
        self.R = instance.disk_radius
        self.C = instance.circumference
        self.alpha = np.array([f.angle for f in feats])
        self.r = np.array([f.r for f in feats])
        self.m = instance.innermost()
        idx = instance.index_of()
        order = instance.order if instance.order is not None else tuple(instance.ids)
        self.order = [idx[fid] for fid in order]
        widths = np.array([f.length for f in feats]) / self.R
        self.widths = widths
        self.delta = np.zeros(n)
        self.start_off = np.zeros(n)
        first = self.order[0]
        cum = -ratios[first] * widths[first]
        for t in self.order:
            self.start_off[t] = cum
            self.delta[t] = cum + ratios[t] * widths[t]
            cum += widths[t]
        self.base = float(np.sum(self.R - self.r))


def locked_order_frame(instance: Instance) -> _Frame:
    return _Frame(instance, instance.effective_ratios())


def _configure(fr: _Frame, phis: np.ndarray, inner_dir: int, tol: float):
    """Ports, direction codes and orbital spans for a batch of rotations."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    ports = np.mod(phis[:, None] + fr.delta[None, :], TAU)
    u = np.mod(ports - fr.alpha[None, :], TAU)
    u[(u <= tol) | (u >= TAU - tol)] = 0.0
    m = fr.m
    v = np.mod(ports[:, m : m + 1] - fr.alpha[None, :], TAU)
    contains = (v > tol) & (v < u - tol)
    codes = np.where(contains, -1, 1)
    spans = np.where(contains, TAU - u, u)
    radial = (u == 0.0) | (fr.r[None, :] == 0.0)
    tie = ((v <= tol) | (v >= TAU - tol)) & ~radial
    tie[:, m] = False
    # innermost feature: the requested direction, regardless of the others
    um = u[:, m]
    codes[:, m] = inner_dir
    spans[:, m] = um if inner_dir == 1 else np.where(um > 0.0, TAU - um, 0.0)
    for k, j in zip(*np.nonzero(tie)):
        inner = fr.r < fr.r[j]
        ip = ports[k, inner]
        ccw_hits = _count_inside(ip, fr.alpha[j], u[k, j], tol)
        cw_hits = _count_inside(ip, ports[k, j], TAU - u[k, j], tol)
        ccw_len, cw_len = u[k, j], TAU - u[k, j]
        pick_cw = (cw_hits == 0, -cw_len) > (ccw_hits == 0, -ccw_len)
        codes[k, j] = -1 if pick_cw else 1
        spans[k, j] = cw_len if pick_cw else ccw_len
    codes[radial] = 0
    spans[radial] = 0.0
    return ports, codes, spans


def _count_inside(x: np.ndarray, start: float, extent: float, tol: float) -> int:
    if extent <= 2 * tol or x.size == 0:
        return 0
    d = np.mod(x - start, TAU)
    return int(np.count_nonzero((d > tol) & (d < extent - tol)))


def _objective(fr: _Frame, spans: np.ndarray) -> np.ndarray:
    return fr.base + spans @ fr.r


def _labeling(fr: _Frame, phi: float, ports, codes, spans) -> Labeling:
    ids = fr.instance.ids
    labels, leaders = [], []
    for i in range(fr.n):
        labels.append(Label(ids[i], phi + fr.start_off[i], float(fr.widths[i]), float(ports[i])))
        leaders.append(Leader(ids[i], _CODE[int(codes[i])], float(spans[i]), float(ports[i])))
    return Labeling(labels, leaders, float(math.fsum(fr.R - fr.r[i] + fr.r[i] * spans[i] for i in range(fr.n))))


def _dir_code(d: Direction | str) -> int:
    d = Direction(d)
    if d is Direction.RADIAL:
        raise InvalidArgument("innermost direction must be cw or ccw")
    return 1 if d is Direction.CCW else -1


def derive_configuration(
    instance: Instance,
    phi0: float,
    innermost_direction: Direction | str,
    *,
    tol: float = ANGLE_TOL,
) -> Labeling:
    """Place all labels in the locked order with the first port at ``phi0``.

    Leaders other than the innermost one take the direction that avoids the
    innermost radial segment. When the innermost port is aligned with a
    feature both directions avoid it; the one whose orbital arc contains no
    port of a closer feature wins, then the shorter one.
    """
    fr = locked_order_frame(instance)
    ports, codes, spans = _configure(fr, np.array([phi0]), _dir_code(innermost_direction), tol)
    return _labeling(fr, norm_angle(phi0), ports[0], codes[0], spans[0])


def configuration(instance: Instance, phi0: float, innermost_direction, *, tol: float = ANGLE_TOL) -> Configuration:
    fr = locked_order_frame(instance)
    ports, codes, spans = _configure(fr, np.array([phi0]), _dir_code(innermost_direction), tol)
    return Configuration(
        norm_angle(phi0),
        Direction(innermost_direction),
        tuple(float(p) for p in ports[0]),
        tuple(_CODE[int(c)] for c in codes[0]),
        tuple(float(s) for s in spans[0]),
    )


def _check_variant(instance: Instance, ports: Mode) -> None:
    v = instance.variant
    if v.order is not Mode.LOCKED or v.ports is not ports:
        raise UnsupportedVariant(f"expected ports={ports.value} with a locked order, got {v.describe()}")
    if v.ratios_locked:
        return
    if v.ratios is Ratios.UNIFORM_FREE and v.sizes is Sizes.UNIFORM:
        return
    raise UnsupportedVariant(f"locked order needs locked ratios or uniform sizes with a free uniform ratio; got {v.describe()}")


def _pair_arrays(fr: _Frame, tol: float):
    """Inner/outer index pairs with ``r[i] < r[j]``."""
    order = np.argsort(fr.r, kind="stable")
    n = fr.n
    a, b = np.triu_indices(n, 1)
    return order[a], order[b]


def _coincident_ports(fr: _Frame, tol: float) -> tuple[int, int] | None:
    d = np.sort(np.mod(fr.delta, TAU))
    if fr.n < 2:
        return None
    gaps = np.diff(np.concatenate([d, [d[0] + TAU]]))
    k = int(np.argmin(gaps))
    if gaps[k] <= tol:
        # a shared port only touches when the outer feature sits on the boundary
        srt = np.argsort(np.mod(fr.delta, TAU), kind="stable")
        i, j = int(srt[k]), int(srt[(k + 1) % fr.n])
        if fr.R - max(fr.r[i], fr.r[j]) > tol * max(1.0, fr.R):
            return i, j
    return None


def forbidden_arcs(fr: _Frame, tol: float = ANGLE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Open rotation arcs ``(start, extent)`` where some pair of leaders crosses."""
    i, j = _pair_arrays(fr, tol)
    keep = (i != fr.m) & (j != fr.m)
    i, j = i[keep], j[keep]
    P = np.mod(fr.alpha[j] - fr.delta[i], TAU)
    Q = np.mod(fr.alpha[j] - fr.delta[fr.m], TAU)
    Z = np.mod(fr.alpha[j] - fr.delta[j], TAU)
    dPQ = np.mod(Q - P, TAU)
    dPZ = np.mod(Z - P, TAU)
    flip = dPZ < dPQ
    start = np.where(flip, Q, P)
    ext = np.where(flip, TAU - dPQ, dPQ)
    return start, ext


def feasible_arcs(starts: np.ndarray, extents: np.ndarray, tol: float = ANGLE_TOL) -> list[CircleInterval]:
    """Closed complement of a union of open arcs on the circle."""
    if starts.size == 0:
        return [CircleInterval.full()]
    s = np.mod(starts, TAU)
    e = s + extents
    wrap = e > TAU
    s_all = np.concatenate([s[~wrap], s[wrap], np.full(int(wrap.sum()), -1.0)])
    e_all = np.concatenate([e[~wrap], np.full(int(wrap.sum()), TAU + 1.0), e[wrap] - TAU])
    order = np.argsort(s_all, kind="stable")
    s_all, e_all = s_all[order], e_all[order]
    reach = np.maximum.accumulate(e_all)
    prev = np.concatenate([[0.0], reach[:-1]])
    gap = s_all >= prev - tol
    segs = []
    for a, b in zip(prev[gap], s_all[gap]):
        a = max(a, 0.0)
        b = min(b, TAU)
        if b < a:
            a = b
        segs.append((a, b))
    if reach[-1] <= TAU + tol:
        segs.append((min(max(reach[-1], 0.0), TAU), TAU))
    segs = [(a, b) for a, b in segs if 0.0 <= a <= TAU]
    if not segs:
        return []
    if len(segs) > 1 and segs[0][0] <= tol and segs[-1][1] >= TAU - tol:
        a, _ = segs.pop()
        _, b = segs.pop(0)
        segs.append((a, b + TAU))
    if len(segs) == 1 and segs[0][1] - segs[0][0] >= TAU - tol:
        return [CircleInterval.full()]
    return [CircleInterval(a, b - a) for a, b in segs]


def _breakpoints(fr: _Frame) -> np.ndarray:
    own = fr.alpha - fr.delta
    flips = fr.alpha - fr.delta[fr.m]
    return np.unique(np.mod(np.concatenate([own, flips]), TAU))


def _candidates_in(arcs: list[CircleInterval], bps: np.ndarray, tol: float) -> np.ndarray:
    pts = []
    for arc in arcs:
        if arc.is_full:
            pts.append(bps)
            continue
        pts.append(np.array([arc.start, norm_angle(arc.start + arc.extent)]))
        d = np.mod(bps - arc.start, TAU)
        inside = (d <= arc.extent + tol) | (d >= TAU - tol)
        pts.append(bps[inside])
    if not pts:
        return np.zeros(0)
    return np.unique(np.mod(np.concatenate(pts), TAU))


def verify_configuration(fr: _Frame, ports, codes, spans, tol: float) -> list[tuple[int, int]]:
    """Crossing pairs (instance indices) of a concrete configuration."""
    ports = np.asarray(ports)
    s0 = np.where(codes == 1, ports - spans, ports)
    X = crossing_matrix(fr.r, ports, s0, spans, fr.R, tol)
    pairs = [(int(a), int(b)) for a, b in zip(*np.nonzero(X))]
    # equal radii only arise in lenient mode; use the scalar predicate there
    srt = np.argsort(fr.r, kind="stable")
    for a, b in zip(srt, srt[1:]):
        if abs(fr.r[a] - fr.r[b]) <= tol * max(1.0, fr.r[b]):
            la = Leader("a", _CODE[int(codes[a])], float(spans[a]), float(ports[a]))
            lb = Leader("b", _CODE[int(codes[b])], float(spans[b]), float(ports[b]))
            if leaders_cross(la, lb, {"a": fr.r[a], "b": fr.r[b]}, strict=False, outer_radius=fr.R, tol=tol):
                pairs.append((int(a), int(b)))
    return pairs


def _pick(objs: np.ndarray, phis: np.ndarray, dir_rank: np.ndarray, bad: np.ndarray, C: float) -> int | None:
    """Index of the minimum, ties by smallest rotation then CCW first."""
    ok = ~bad
    if not ok.any():
        return None
    best = objs[ok].min()
    near = ok & (objs <= best + LENGTH_TOL * C)
    cand = np.nonzero(near)[0]
    key = np.lexsort((dir_rank[cand], phis[cand]))
    return int(cand[key[0]])


def solve_locked_order(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    """Minimum total leader length over all rotations of a locked label order."""
    _check_variant(instance, Mode.FREE)
    require_valid(instance, strict=strict, tol=tol)
    fr = locked_order_frame(instance)
    diags: list[str] = []
    clash = _coincident_ports(fr, tol)
    if clash is not None:
        a, b = (instance.ids[k] for k in clash)
        return SolveReport(INFEASIBLE, solver="locked-order", diagnostics=[f"ports of {a!r} and {b!r} always coincide"])
    starts, exts = forbidden_arcs(fr, tol)
    arcs = feasible_arcs(starts, exts, tol)
    if len(arcs) > 1:
        diags.append(f"crossing-free rotation set consists of {len(arcs)} arcs; all are searched")
    if not arcs:
        return SolveReport(INFEASIBLE, solver="locked-order", diagnostics=diags + ["every rotation produces a crossing"])
    phis = _candidates_in(arcs, _breakpoints(fr), tol)
    all_phi, all_obj, all_rank, confs = [], [], [], []
    for rank, d in enumerate((1, -1)):  # CCW before CW on ties
        ports, codes, spans = _configure(fr, phis, d, tol)
        all_phi.append(phis)
        all_obj.append(_objective(fr, spans))
        all_rank.append(np.full(phis.size, rank))
        confs.append((ports, codes, spans))
    phi_v = np.concatenate(all_phi)
    obj_v = np.concatenate(all_obj)
    rank_v = np.concatenate(all_rank)
    bad = np.zeros(phi_v.size, dtype=bool)
    K = phis.size
    while True:
        k = _pick(obj_v, phi_v, rank_v, bad, fr.C)
        if k is None:
            return SolveReport(
                INFEASIBLE, solver="locked-order", diagnostics=diags + ["no candidate rotation survived verification"]
            )
        ports, codes, spans = (a[k % K] for a in confs[k // K])
        crossing = verify_configuration(fr, ports, codes, spans, tol)
        if not crossing:
            lab = _labeling(fr, float(phi_v[k]), ports, codes, spans)
            return SolveReport(
                OPTIMAL,
                lab,
                lab.objective,
                solver="locked-order",
                diagnostics=diags,
                details={"rotation": float(phi_v[k]), "innermost_direction": _CODE[1 if k < K else -1].value,
                         "feasible_arcs": [(a.start, a.extent) for a in arcs], "candidates": int(phi_v.size)},
            )
        bad[k] = True


def _pair_critical_angles(fr: _Frame, idx: tuple[int, ...]) -> np.ndarray:
    a = fr.alpha[list(idx)]
    d = fr.delta[list(idx)]
    return np.unique(np.mod((a[:, None] - d[None, :]).ravel(), TAU))


def admissible_range(
    instance: Instance,
    i: str,
    j: str,
    innermost_direction: Direction | str = Direction.CCW,
    *,
    tol: float = ANGLE_TOL,
) -> CircleInterval:
    """Rotations for which the leaders of features ``i`` and ``j`` do not cross.

    Built by classifying every sub-interval between critical rotations at its
    midpoint and merging the admissible ones. Raises ``AdmissibleRangeError``
    if the result is not one closed arc.
    """
    if i == j:
        raise InvalidArgument("admissible range needs two distinct features")
    idx = instance.index_of()
    a, b = idx[i], idx[j]
    fr = locked_order_frame(instance)
    if abs(fr.r[a] - fr.r[b]) <= tol * max(1.0, fr.r[a], fr.r[b]):
        from .errors import DegenerateInput

        raise DegenerateInput(f"features {i!r} and {j!r} share a radius")
    d = _dir_code(innermost_direction)
    crit = _pair_critical_angles(fr, (a, b, fr.m))
    radii = {"a": fr.r[a], "b": fr.r[b]}

    def crosses(phi: float) -> bool:
        ports, codes, spans = _configure(fr, np.array([phi]), d, tol)
        la = Leader("a", _CODE[int(codes[0, a])], float(spans[0, a]), float(ports[0, a]))
        lb = Leader("b", _CODE[int(codes[0, b])], float(spans[0, b]), float(ports[0, b]))
        return leaders_cross(la, lb, radii, outer_radius=fr.R, tol=tol)

    nxt = np.concatenate([crit[1:], [crit[0] + TAU]])
    good = [not crosses(0.5 * (lo + hi)) for lo, hi in zip(crit, nxt)]
    if all(good):
        return CircleInterval.full()
    if not any(good):
        # isolated touching rotations have measure zero and are not reported
        return CircleInterval.nothing()
    # merge runs of admissible sub-intervals, cyclically
    k0 = good.index(False)
    runs = []
    cur = None
    for t in range(1, len(good) + 1):
        s = (k0 + t) % len(good)
        if good[s]:
            lo = crit[s]
            hi = nxt[s]
            if cur is None:
                cur = [lo, hi - lo]
            else:
                cur[1] += hi - lo
        elif cur is not None:
            runs.append(cur)
            cur = None
    if cur is not None:
        runs.append(cur)
    if len(runs) != 1:
        log.warning("admissible set of %s/%s has %d pieces", i, j, len(runs))
        raise AdmissibleRangeError(f"admissible set of {i!r} and {j!r} has {len(runs)} pieces")
    return CircleInterval(runs[0][0], runs[0][1])


def analytic_admissible_range(instance: Instance, i: str, j: str, *, tol: float = ANGLE_TOL) -> CircleInterval:
    """Closed-form admissible range, the complement of one forbidden open arc."""
    idx = instance.index_of()
    fr = locked_order_frame(instance)
    a, b = idx[i], idx[j]
    if fr.r[a] > fr.r[b]:
        a, b = b, a
    if fr.m in (a, b):
        return CircleInterval.full()
    P = norm_angle(fr.alpha[b] - fr.delta[a])
    Q = norm_angle(fr.alpha[b] - fr.delta[fr.m])
    Z = norm_angle(fr.alpha[b] - fr.delta[b])
    dPQ = ccw_diff(P, Q)
    if ccw_diff(P, Z) < dPQ:
        return CircleInterval(P, dPQ)
    return CircleInterval(Q, TAU - dPQ)
