"""Brute-force reference solvers for small instances.

These share the geometric primitives with the solvers but none of their
search logic, so agreement between the two is meaningful. Size guards are
hard: an oracle refuses rather than samples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import OracleRefused, UnsupportedVariant
from .geometry import (
    ANGLE_TOL,
    LENGTH_TOL,
    TAU,
    Direction,
    Label,
    Labeling,
    Leader,
    PolarPoint,
    leader_length,
    leaders_cross,
    make_leader,
    norm_angle,
)
from .instance import Instance, Mode, Ratios, Sizes
from .report import INFEASIBLE, OPTIMAL, require_valid

MAX_ROTATION_FEATURES = 8
MAX_ASSIGNMENTS = 10**7


@dataclass
class OracleResult:
    status: str
    objective: float | None
    labeling: Labeling | None
    search_space: int
    grid: int = 0


def _ratios_for_rotation(instance: Instance) -> list[float]:
    v = instance.variant
    if v.ratios is Ratios.UNIFORM_LOCKED:
        return [v.k] * instance.n
    if v.ratios is Ratios.NONUNIFORM_LOCKED:
        return list(v.K)
    if v.ratios is Ratios.UNIFORM_FREE and v.sizes is Sizes.UNIFORM:
        return [0.0] * instance.n
    raise UnsupportedVariant(f"oracle cannot fix port ratios for {v.describe()}")


def _placement(instance: Instance, order: tuple[str, ...], ratios: list[float]):
    """Label-start and port offsets relative to the first port, per feature id."""
    R = instance.disk_radius
    pos = {f.id: i for i, f in enumerate(instance.features)}
    first = pos[order[0]]
    w = {f.id: f.length / R for f in instance.features}
    cursor = -ratios[first] * w[order[0]]
    start, port = {}, {}
    for fid in order:
        start[fid] = cursor
        port[fid] = cursor + ratios[pos[fid]] * w[fid]
        cursor += w[fid]
    return start, port, w


def _best_at_rotation(instance, phi, port_off, inner_id, inner_dir, radii, tol):
    feats = {f.id: f for f in instance.features}
    R = instance.disk_radius
    C = instance.circumference
    ports = {fid: norm_angle(phi + off) for fid, off in port_off.items()}
    inner = make_leader(feats[inner_id].point, ports[inner_id], inner_dir, feature_id=inner_id, tol=tol)
    choices = []
    ids = []
    for fid in port_off:
        if fid == inner_id:
            continue
        opts = {}
        for d in (Direction.CCW, Direction.CW):
            ld = make_leader(feats[fid].point, ports[fid], d, feature_id=fid, tol=tol)
            if not leaders_cross(inner, ld, radii, outer_radius=R, tol=tol):
                opts[(ld.direction, round(ld.span, 15))] = ld
        if not opts:
            return None
        ids.append(fid)
        choices.append(list(opts.values()))
    best = None
    for combo in itertools.product(*choices):
        ok = True
        for a in range(len(combo)):
            for b in range(a + 1, len(combo)):
                if leaders_cross(combo[a], combo[b], radii, outer_radius=R, tol=tol):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        leaders = (inner,) + combo
        total = math.fsum(leader_length(radii[ld.feature], ld.span, C) for ld in leaders)
        if best is None or total < best[0] - LENGTH_TOL * C:
            best = (total, leaders)
    return best


def oracle_locked_order_free(
    instance: Instance,
    extra_grid: int = 64,
    *,
    strict: bool = True,
    tol: float = ANGLE_TOL,
) -> OracleResult:
    """Exhaustive rotation search for a locked label order with free ports.

    Every rotation at which a port meets some feature's angle is evaluated,
    plus ``extra_grid`` evenly spaced rotations, for both directions of the
    innermost leader. The objective is linear between consecutive rotations
    of the first kind, so this set is exact.
    """
    v = instance.variant
    if v.ports is not Mode.FREE:
        raise UnsupportedVariant("rotation oracle needs free ports")
    if instance.n > MAX_ROTATION_FEATURES:
        raise OracleRefused(f"{instance.n} features exceed the rotation oracle limit of {MAX_ROTATION_FEATURES}")
    require_valid(instance, strict=strict, tol=tol)
    ratios = _ratios_for_rotation(instance)
    order = instance.order if instance.order is not None else tuple(instance.ids)
    start_off, port_off, w = _placement(instance, order, ratios)
    radii = instance.radii
    feats = {f.id: f for f in instance.features}
    inner_id = instance.ids[instance.innermost()]
    crit = {norm_angle(feats[a].angle - port_off[b]) for a in port_off for b in port_off}
    crit |= {TAU * t / extra_grid for t in range(extra_grid)}
    phis = sorted(crit)
    best = None
    for d in (Direction.CCW, Direction.CW):
        for phi in phis:
            got = _best_at_rotation(instance, phi, port_off, inner_id, d, radii, tol)
            if got is None:
                continue
            if best is None or got[0] < best[0] - LENGTH_TOL * instance.circumference:
                best = (got[0], got[1], phi)
    space = 2 * len(phis)
    if best is None:
        return OracleResult(INFEASIBLE, None, None, space, extra_grid)
    total, leaders, phi = best
    labels = [Label(fid, phi + start_off[fid], w[fid], phi + port_off[fid]) for fid in instance.ids]
    by_id = {ld.feature: ld for ld in leaders}
    lab = Labeling(labels, [by_id[fid] for fid in instance.ids], total)
    return OracleResult(OPTIMAL, total, lab, space, extra_grid)


def oracle_free_order(
    instance: Instance,
    extra_grid: int = 16,
    *,
    strict: bool = True,
    tol: float = ANGLE_TOL,
) -> OracleResult:
    """Exhaustive search over every cyclic label order, then every rotation."""
    v = instance.variant
    if v.ports is not Mode.FREE:
        raise UnsupportedVariant("free-order oracle needs free ports")
    if instance.n > MAX_ROTATION_FEATURES:
        raise OracleRefused(f"{instance.n} features exceed the free-order oracle limit of {MAX_ROTATION_FEATURES}")
    _ratios_for_rotation(instance)
    ids = instance.ids
    locked = replace(instance, variant=replace(v, order=Mode.LOCKED))
    best = None
    space = 0
    for rest in itertools.permutations(ids[1:]):
        res = oracle_locked_order_free(replace(locked, order=(ids[0],) + rest), extra_grid, strict=strict, tol=tol)
        space += res.search_space
        if res.status != OPTIMAL:
            continue
        if best is None or res.objective < best.objective - LENGTH_TOL * instance.circumference:
            best = res
    if best is None:
        return OracleResult(INFEASIBLE, None, None, space, extra_grid)
    return OracleResult(OPTIMAL, best.objective, best.labeling, space, extra_grid)


def _assignment_count(m: int, n: int) -> int:
    return math.perm(m, n)


def _iter_assignments(m: int, n: int, chunk: int = 200_000):
    it = itertools.permutations(range(m), n)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int16).reshape(len(block), n)


def _leader_options(point: PolarPoint, port: float, fid: str, tol: float) -> list[Leader]:
    opts = {}
    for d in (Direction.CCW, Direction.CW):
        ld = make_leader(point, port, d, feature_id=fid, tol=tol)
        opts[(ld.direction, ld.span)] = ld
    return list(opts.values())


def _best_directions(instance: Instance, ports: list[float], bound: float, tol: float):
    """Cheapest crossing-free direction choice for fixed ports, if below ``bound``."""
    R = instance.disk_radius
    C = instance.circumference
    radii = instance.radii
    options = [_leader_options(f.point, ports[i], f.id, tol) for i, f in enumerate(instance.features)]
    best = None
    for combo in itertools.product(*options):
        total = math.fsum(leader_length(radii[ld.feature], ld.span, C) for ld in combo)
        if total > bound + LENGTH_TOL * C or (best is not None and total >= best[0] - LENGTH_TOL * C):
            continue
        if any(
            leaders_cross(combo[a], combo[b], radii, outer_radius=R, tol=tol)
            for a in range(len(combo))
            for b in range(a + 1, len(combo))
        ):
            continue
        best = (total, combo)
    return best


def oracle_locked_candidates(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> OracleResult:
    """Exhaustive search over injective feature-to-candidate port assignments."""
    v = instance.variant
    if v.ports is not Mode.LOCKED:
        raise UnsupportedVariant("candidate oracle needs locked ports")
    require_valid(instance, strict=strict, tol=tol, allow=("infeasible-candidates",))
    cands = np.array(instance.candidates or (), dtype=float)
    n, m = instance.n, cands.size
    if n > m:
        return OracleResult(INFEASIBLE, None, None, 0)
    space = _assignment_count(m, n)
    if space > MAX_ASSIGNMENTS:
        raise OracleRefused(f"{space} assignments exceed the limit of {MAX_ASSIGNMENTS}")
    if v.order is Mode.LOCKED:
        return _oracle_candidates_locked_order(instance, cands, space, tol)
    if v.sizes is not Sizes.UNIFORM or v.ratios not in (Ratios.UNIFORM_LOCKED, Ratios.UNIFORM_FREE):
        raise UnsupportedVariant(f"free-order candidate oracle needs uniform sizes and ratios, got {v.describe()}")
    return _oracle_candidates_free_order(instance, cands, space, tol)


def _oracle_candidates_free_order(instance: Instance, cands: np.ndarray, space: int, tol: float) -> OracleResult:
    n, m = instance.n, cands.size
    C = instance.circumference
    R = instance.disk_radius
    # cheapest of the two leaders per (feature, candidate), from the primitives
    W = np.empty((n, m))
    for i, f in enumerate(instance.features):
        for c in range(m):
            W[i, c] = min(leader_length(f.r, ld.span, C) for ld in _leader_options(f.point, float(cands[c]), f.id, tol))
    costs, blocks = [], []
    for block in _iter_assignments(m, n):
        blocks.append(block)
        costs.append(W[np.arange(n)[None, :], block].sum(axis=1))
    if not blocks:
        return OracleResult(INFEASIBLE, None, None, space)
    perms = np.concatenate(blocks)
    cost = np.concatenate(costs)
    order = np.argsort(cost, kind="stable")
    best = None
    for idx in order:
        if best is not None and cost[idx] > best[0] + LENGTH_TOL * C:
            break
        ports = [float(cands[c]) for c in perms[idx]]
        got = _best_directions(instance, ports, best[0] if best else math.inf, tol)
        if got is not None and (best is None or got[0] < best[0] - LENGTH_TOL * C):
            best = got
    if best is None:
        return OracleResult(INFEASIBLE, None, None, space)
    total, leaders = best
    k = instance.variant.k if instance.variant.ratios is Ratios.UNIFORM_LOCKED else 0.5
    labels = []
    for f, ld in zip(instance.features, leaders):
        w = f.length / R
        labels.append(Label(f.id, ld.port - k * w, w, ld.port))
    return OracleResult(OPTIMAL, total, Labeling(labels, leaders, total), space)


def _oracle_candidates_locked_order(instance: Instance, cands: np.ndarray, space: int, tol: float) -> OracleResult:
    n = instance.n
    C = instance.circumference
    ratios = _ratios_for_rotation(instance)
    order = instance.order
    start_off, port_off, w = _placement(instance, order, ratios)
    pos = instance.index_of()
    first = pos[order[0]]
    rel = np.array([port_off[fid] for fid in instance.ids])
    survivors = []
    for block in _iter_assignments(cands.size, n):
        P = cands[block]
        d = np.mod(P - P[:, [first]] - rel[None, :], TAU)
        ok = np.all(np.minimum(d, TAU - d) <= tol, axis=1)
        survivors.extend(block[ok].tolist())
    best = None
    for sv in survivors:
        phi = float(cands[sv[first]])
        ports = [norm_angle(phi + rel[i]) for i in range(n)]
        got = _best_directions(instance, ports, best[0] if best else math.inf, tol)
        if got is None:
            continue
        if best is None or got[0] < best[0] - LENGTH_TOL * C or (
            got[0] <= best[0] + LENGTH_TOL * C and phi < best[2]
        ):
            best = (got[0], got[1], phi)
    if best is None:
        return OracleResult(INFEASIBLE, None, None, space)
    total, leaders, phi = best
    labels = [Label(fid, phi + start_off[fid], w[fid], phi + port_off[fid]) for fid in instance.ids]
    return OracleResult(OPTIMAL, total, Labeling(labels, leaders, total), space)
