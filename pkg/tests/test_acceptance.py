"""Acceptance gate: one test per criterion, each recording a pass/fail line."""

from __future__ import annotations

import math
import time
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest

from orbital_labeling.candidates import solve_free_order_locked_ports, solve_locked_order_locked_ports
from orbital_labeling.free_order import solve_free_order_uniform
from orbital_labeling.generators import gen_partition_gadget, gen_random
from orbital_labeling.geometry import Direction, Label, Labeling, leader_length, make_leader
from orbital_labeling.instance import Variant
from orbital_labeling.oracle import oracle_free_order, oracle_locked_candidates, oracle_locked_order_free
from orbital_labeling.render import render_svg
from orbital_labeling.report import OPTIMAL
from orbital_labeling.rotation import solve_locked_order
from orbital_labeling.solve import solve
from orbital_labeling.validation import validate_labeling

NS = "{http://www.w3.org/2000/svg}"


def _close(a, b, rel):
    return math.isclose(a, b, rel_tol=rel, abs_tol=rel)


def _agree(rep, res, rel):
    if rep.status != res.status:
        return False
    return rep.status != OPTIMAL or _close(rep.objective, res.objective, rel)


RATIO_SETTINGS = {
    "uniform-locked k=0": Variant(order="locked", k=0.0),
    "uniform-locked k=0.5": Variant(order="locked", k=0.5),
    "uniform-free": Variant(order="locked", ratios="uniform-free"),
    "nonuniform-locked": Variant(order="locked", sizes="nonuniform", ratios="nonuniform-locked"),
}


def test_criterion_1_locked_order_oracle(acceptance):
    t0 = time.perf_counter()
    bad = []
    for name, variant in RATIO_SETTINGS.items():
        for seed in range(200):
            inst = gen_random(seed, 1 + seed % 6, variant)
            if not _agree(solve_locked_order(inst), oracle_locked_order_free(inst), 1e-6):
                bad.append((name, seed))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    acceptance(1, ok, f"{200 * len(RATIO_SETTINGS)} instances, {len(bad)} mismatches, {dt:.1f}s (limit 60s)")
    assert not bad, bad[:5]
    assert dt < 60


def test_criterion_2_free_order_oracle(acceptance):
    t0 = time.perf_counter()
    bad = []
    for seed in range(100):
        variant = Variant(k=[0.0, 0.5, 1.0][seed % 3]) if seed % 4 else Variant(ratios="uniform-free")
        inst = gen_random(1000 + seed, 1 + seed % 6, variant)
        if not _agree(solve_free_order_uniform(inst), oracle_free_order(inst), 1e-6):
            bad.append(seed)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    acceptance(2, ok, f"100 instances, {len(bad)} mismatches, {dt:.1f}s (limit 300s)")
    assert not bad, bad[:5]
    assert dt < 300


def test_criterion_3_candidate_oracle(acceptance):
    bad = []
    count = 0
    for seed in range(100):
        n = 1 + seed % 5  # gen_random places 2n candidates, so at most 10
        k = [0.0, 0.25, 0.5, 1.0][seed % 4]
        locked = gen_random(2000 + seed, n, Variant(ports="locked", order="locked", k=k))
        free = gen_random(3000 + seed, n, Variant(ports="locked", k=k))
        if seed % 3 == 0:
            # unevenly spaced candidates exercise the lookup path
            rng = np.random.default_rng(seed)
            locked = replace(locked, candidates=tuple(rng.uniform(0, 2 * math.pi, 2 * n)))
        for inst, solver in ((locked, solve_locked_order_locked_ports), (free, solve_free_order_locked_ports)):
            assert len(inst.candidates) <= 10
            count += 1
            if not _agree(solver(inst), oracle_locked_candidates(inst), 1e-6):
                bad.append((solver.__name__, seed))
    acceptance(3, not bad, f"{count} solves, {len(bad)} mismatches")
    assert not bad, bad[:5]


CROSSING_VARIANTS = [
    Variant(order="locked"),
    Variant(order="locked", k=0.7),
    Variant(order="locked", ratios="uniform-free"),
    Variant(order="locked", sizes="nonuniform", ratios="nonuniform-locked"),
    Variant(),
    Variant(ratios="uniform-free"),
    Variant(ports="locked", order="locked"),
    Variant(ports="locked"),
    Variant(ports="locked", ratios="uniform-free"),
    Variant(sizes="nonuniform"),
]


def test_criterion_4_crossing_free(acceptance):
    crossings = 0
    solved = 0
    for seed in range(500):
        variant = CROSSING_VARIANTS[seed % len(CROSSING_VARIANTS)]
        n_max = 5 if variant.sizes.value == "nonuniform" and variant.order.value == "free" else 12
        inst = gen_random(4000 + seed, 2 + seed % (n_max - 1), variant, "sqrt" if seed % 2 else "stratified")
        rep = solve(inst)
        if rep.labeling is None:
            continue
        solved += 1
        crossings += len(validate_labeling(inst, rep.labeling).of_kind("crossing"))
    acceptance(4, crossings == 0, f"500 instances, {solved} labelings, {crossings} crossing violations")
    assert crossings == 0


def test_criterion_5_ratio_invariance(acceptance):
    bad = []
    ks = (0.0, 0.25, 0.5, 1.0)
    for seed in range(50):
        n = 2 + seed % 7
        base = gen_random(5000 + seed, n, Variant(order="locked"))
        reps = [solve_locked_order(base.with_variant(k=k)) for k in ks]
        if any(r.status != reps[0].status for r in reps) or (
            reps[0].status == OPTIMAL and not all(_close(r.objective, reps[0].objective, 1e-9) for r in reps)
        ):
            bad.append(("rotation", seed))
        base = gen_random(6000 + seed, n, Variant(ports="locked"))
        reps = [solve_free_order_locked_ports(base.with_variant(k=k)) for k in ks]
        if not all(_close(r.objective, reps[0].objective, 1e-9) for r in reps):
            bad.append(("matching objective", seed))
        if any(r.details["matching"] != reps[0].details["matching"] for r in reps):
            bad.append(("matching", seed))
    acceptance(5, not bad, f"50 instances x 2 solvers x 4 ratios, {len(bad)} disagreements")
    assert not bad, bad[:5]


YES = [(1, 1, 2), (2, 3, 5), (1, 2, 3, 4)]
NO = [(1, 1, 3), (1, 2, 4)]


def test_criterion_6_partition_gadget(acceptance):
    t0 = time.perf_counter()
    wrong = []
    rows = []
    for X in YES + NO:
        inst, k = gen_partition_gadget(X)
        res = oracle_free_order(inst)
        below = res.status == OPTIMAL and res.objective < k
        rows.append(f"{set(X) if len(set(X)) == len(X) else list(X)}: {res.objective:.4f} vs k={k:.4f}")
        if below != (X in YES):
            wrong.append(X)
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 120
    acceptance(6, ok, f"{dt:.1f}s; wrong side of k: {wrong}; " + "; ".join(rows))
    assert not wrong, f"objective on the wrong side of the threshold for {wrong}"
    assert dt < 120


def _timed(fn, inst):
    t0 = time.perf_counter()
    rep = fn(inst)
    return rep, time.perf_counter() - t0


def test_criterion_7_complexity(acceptance):
    rot, t_rot = _timed(solve_locked_order, gen_random(7, 2000, Variant(order="locked")))
    free, t_free = _timed(solve_free_order_uniform, gen_random(7, 30))
    inst = gen_random(7, 500, Variant(ports="locked"))
    rng = np.random.default_rng(7)
    inst = replace(inst, candidates=tuple(np.sort(rng.uniform(0, 2 * math.pi, 1000))))
    match, t_match = _timed(solve_free_order_locked_ports, inst)
    ok = t_rot < 10 and t_free < 120 and t_match < 30
    acceptance(
        7,
        ok,
        f"locked order n=2000 {t_rot:.2f}s (<10); free order n=30 {t_free:.2f}s (<120); "
        f"matching 500x1000 {t_match:.2f}s (<30)",
    )
    assert rot.status in ("optimal", "infeasible") and free.status == OPTIMAL and match.status == OPTIMAL
    assert ok


def _shift_port(inst, lab: Labeling, fid: str, delta: float) -> Labeling:
    f = inst.feature(fid)
    labels = [Label(lb.feature, lb.start, lb.extent, lb.port + delta) if lb.feature == fid else lb for lb in lab.labels]
    leaders = []
    for ld in lab.leaders:
        if ld.feature == fid:
            d = Direction.CCW if ld.direction is Direction.RADIAL else ld.direction
            ld = make_leader(f.point, ld.port + delta, d, feature_id=fid)
        leaders.append(ld)
    return _with_objective(inst, labels, leaders)


def _swap_ports(inst, lab: Labeling, a: str, b: str) -> Labeling:
    pa, pb = lab.label(a).port, lab.label(b).port
    new = {a: pb, b: pa}
    labels = [Label(lb.feature, lb.start, lb.extent, new[lb.feature]) if lb.feature in new else lb for lb in lab.labels]
    leaders = []
    for ld in lab.leaders:
        if ld.feature in new:
            d = Direction.CCW if ld.direction is Direction.RADIAL else ld.direction
            ld = make_leader(inst.feature(ld.feature).point, new[ld.feature], d, feature_id=ld.feature)
        leaders.append(ld)
    return _with_objective(inst, labels, leaders)


def _with_objective(inst, labels, leaders) -> Labeling:
    radii = inst.radii
    total = math.fsum(leader_length(radii[ld.feature], ld.span, inst.circumference) for ld in leaders)
    return Labeling(labels, leaders, total)


def test_criterion_8_validator_sensitivity(acceptance):
    rng = np.random.default_rng(8)
    missed = []
    outputs = 0
    seed = 0
    while outputs < 100:
        variant = CROSSING_VARIANTS[seed % len(CROSSING_VARIANTS)]
        inst = gen_random(8000 + seed, 2 + seed % 5, variant)
        seed += 1
        rep = solve(inst)
        if rep.labeling is None or not validate_labeling(inst, rep.labeling).ok:
            continue
        outputs += 1
        ids = inst.ids
        if outputs % 2:
            fid = ids[int(rng.integers(len(ids)))]
            sign = 1 if rng.random() < 0.5 else -1
            mutated = _shift_port(inst, rep.labeling, fid, sign * 0.05)
            what = f"shift {fid}"
        else:
            a, b = rng.choice(len(ids), 2, replace=False)
            mutated = _swap_ports(inst, rep.labeling, ids[a], ids[b])
            what = f"swap {ids[a]},{ids[b]}"
        if validate_labeling(inst, mutated).ok:
            missed.append((seed - 1, variant.describe(), what))
    acceptance(8, not missed, f"100 mutated outputs, {len(missed)} undetected: {missed}")
    assert not missed, missed[:5]


def test_criterion_9_renderer(acceptance):
    bad = []
    rendered = 0
    seed = 0
    while rendered < 20:
        variant = CROSSING_VARIANTS[seed % len(CROSSING_VARIANTS)]
        inst = gen_random(9000 + seed, 2 + seed % 5, variant)
        seed += 1
        lab = solve(inst).labeling
        if lab is None:
            continue
        rendered += 1
        svg = render_svg(inst, lab)
        try:
            root = ET.fromstring(svg.encode())
        except ET.ParseError as e:
            bad.append((seed - 1, str(e)))
            continue
        paths = [el.get("class") for el in root.iter(NS + "path")]
        if paths.count("leader") != inst.n or paths.count("label") != inst.n:
            bad.append((seed - 1, "element count"))
        if render_svg(inst, lab).encode() != svg.encode():
            bad.append((seed - 1, "nondeterministic"))
    acceptance(9, not bad, f"20 SVGs, {len(bad)} problems")
    assert not bad, bad
