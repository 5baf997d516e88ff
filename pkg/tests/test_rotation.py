from __future__ import annotations

import math

import numpy as np
import pytest

from orbital_labeling.errors import DegenerateInput, InvalidArgument, UnsupportedVariant
from orbital_labeling.generators import gen_random
from orbital_labeling.geometry import TAU, Direction, leaders_cross
from orbital_labeling.instance import Variant, make_instance
from orbital_labeling.oracle import oracle_locked_order_free
from orbital_labeling.rotation import (
    CircleInterval,
    admissible_range,
    analytic_admissible_range,
    configuration,
    derive_configuration,
    feasible_arcs,
    solve_locked_order,
)
from orbital_labeling.validation import validate_labeling

LOCKED_VARIANTS = [
    Variant(order="locked"),
    Variant(order="locked", k=0.0),
    Variant(order="locked", ratios="uniform-free"),
    Variant(order="locked", sizes="nonuniform", ratios="nonuniform-locked"),
    Variant(order="locked", sizes="nonuniform", k=0.3),
]


def test_single_feature_aligned():
    inst = make_instance(TAU, [("a", 0.4, 1.0, TAU)], Variant(order="locked"), order=["a"])
    lab = derive_configuration(inst, 1.0, "ccw")
    assert lab.objective == pytest.approx(1.0 - 0.4)
    assert lab.leaders[0].direction is Direction.RADIAL


def test_two_feature_radial(two_radial):
    lab = derive_configuration(two_radial, 0.0, "ccw")
    assert lab.objective == pytest.approx(1.2)
    assert all(ld.direction is Direction.RADIAL for ld in lab.leaders)
    assert validate_labeling(two_radial, lab).ok


def test_two_feature_shifted(two_radial):
    # both leaders turn ccw by the shift, so the length grows by 0.1 * (0.2 + 0.6)
    lab = derive_configuration(two_radial, 0.1, "ccw")
    assert lab.objective == pytest.approx(1.28)


def test_innermost_direction_only_changes_its_own_leader(two_radial):
    a = configuration(two_radial, 0.3, "ccw")
    b = configuration(two_radial, 0.3, "cw")
    assert a.ports == b.ports
    assert a.directions[1] == b.directions[1]
    assert a.directions[0] is Direction.CCW and b.directions[0] is Direction.CW


def test_derive_rejects_radial_direction(two_radial):
    with pytest.raises(InvalidArgument):
        derive_configuration(two_radial, 0.0, "radial")


def _slope(inst, phi, d):
    conf = configuration(inst, phi, d)
    sign = {Direction.CCW: 1.0, Direction.CW: -1.0, Direction.RADIAL: 0.0}
    return sum(sign[dd] * f.r for dd, f in zip(conf.directions, inst.features))


@pytest.mark.parametrize("seed", range(10))
def test_objective_linear_between_breakpoints(seed):
    inst = gen_random(seed, 5, Variant(order="locked"))
    conf0 = configuration(inst, 0.0, "ccw")
    offsets = [p - 0.0 for p in conf0.ports]
    bps = sorted(
        {(f.angle - o) % TAU for f in inst.features for o in offsets}
    )
    h = 1e-5
    for lo, hi in zip(bps, bps[1:] + [bps[0] + TAU]):
        if hi - lo < 10 * h:
            continue
        mid = 0.5 * (lo + hi)
        for d in ("ccw", "cw"):
            f = lambda x: derive_configuration(inst, x, d).objective  # noqa: E731
            fd = (f(mid + h) - f(mid - h)) / (2 * h)
            assert fd == pytest.approx(_slope(inst, mid, d), abs=1e-6)


def test_objective_jumps_where_innermost_port_passes_a_feature():
    # three features; rotating the innermost port across the middle feature's
    # angle flips that leader to the other side of the circle
    feats = [("a", 0.1, 0.0, TAU / 3), ("b", 0.5, 0.5, TAU / 3), ("c", 0.8, 4.0, TAU / 3)]
    inst = make_instance(TAU, feats, Variant(order="locked", k=0.0), order=["a", "b", "c"])
    before = derive_configuration(inst, 0.5 - 1e-6, "ccw").objective
    after = derive_configuration(inst, 0.5 + 1e-6, "ccw").objective
    # b's port sits 2pi/3 past its feature; its leader swaps a 2pi/3 arc for a 4pi/3 one
    assert abs(after - before) == pytest.approx(0.5 * (TAU - 2 * TAU / 3), abs=1e-4)


def _grid_check(inst, i, j, d, arc, samples=4096):
    mism = 0
    for phi in np.linspace(0.0, TAU, samples, endpoint=False):
        lab = derive_configuration(inst, phi, d)
        crosses = leaders_cross(lab.leader(i), lab.leader(j), inst.radii, outer_radius=inst.disk_radius)
        near_end = not arc.empty and not arc.is_full and min(
            abs(math.remainder(phi - arc.start, TAU)), abs(math.remainder(phi - arc.start - arc.extent, TAU))
        ) < 1e-6
        if not near_end and crosses == arc.contains(phi):
            mism += 1
    return mism


def test_admissible_full_circle_for_antipodal_pair(two_radial):
    arc = admissible_range(two_radial, "p1", "p2")
    assert arc.is_full
    assert _grid_check(two_radial, "p1", "p2", "ccw", arc) == 0


@pytest.mark.parametrize("seed", range(6))
def test_admissible_range_matches_grid_scan(seed):
    inst = gen_random(seed, 4, Variant(order="locked"))
    inner = inst.ids[inst.innermost()]
    others = [fid for fid in inst.ids if fid != inner]

    for a, b in [(others[0], others[1]), (others[1], others[2]), (inner, others[0])]:
        for d in ("ccw", "cw"):
            arc = admissible_range(inst, a, b, d)
            assert _grid_check(inst, a, b, d, arc, samples=1024) == 0
            ana = analytic_admissible_range(inst, a, b)
            if not arc.is_full:

                assert ana.start == pytest.approx(arc.start, abs=1e-9)
                assert ana.extent == pytest.approx(arc.extent, abs=1e-9)
            else:
                assert ana.is_full


def test_proper_admissible_range_exists():
    # the inner port sweeps through the outer feature's orbital arc for some rotations
    found = False
    for seed in range(20):
        inst = gen_random(seed, 3, Variant(order="locked"))
        inner = inst.ids[inst.innermost()]
        a, b = [fid for fid in inst.ids if fid != inner]
        arc = admissible_range(inst, a, b)
        if not arc.is_full and arc.extent > 0:
            assert _grid_check(inst, a, b, "ccw", arc) == 0
            assert TAU - arc.extent > 0
            found = True
            break
    assert found


def test_admissible_range_preconditions(two_radial):
    with pytest.raises(InvalidArgument):
        admissible_range(two_radial, "p1", "p1")
    feats = [("a", 0.3, 0.0, math.pi), ("b", 0.3, 1.0, math.pi)]
    inst = make_instance(TAU, feats, Variant(order="locked"), order=["a", "b"])
    with pytest.raises(DegenerateInput):
        admissible_range(inst, "a", "b")


def test_feasible_arcs_complement():
    arcs = feasible_arcs(np.array([0.5, 1.0, 6.0]), np.array([1.0, 1.0, 0.4]))
    # the last forbidden arc wraps past zero, leaving two pieces
    assert len(arcs) == 2
    assert arcs[0].start == pytest.approx(6.4 - TAU) and arcs[0].extent == pytest.approx(0.5 - (6.4 - TAU))
    assert arcs[1].start == pytest.approx(2.0) and arcs[1].extent == pytest.approx(4.0)
    wrap = feasible_arcs(np.array([6.0]), np.array([1.0]))
    assert wrap[0].start == pytest.approx(7.0 - TAU) and wrap[0].extent == pytest.approx(TAU - 1.0)
    assert feasible_arcs(np.zeros(0), np.zeros(0))[0].is_full
    assert feasible_arcs(np.array([0.0, 3.0]), np.array([3.5, 3.5])) == []


def test_circle_interval_intersection_two_pieces():
    a = CircleInterval(0.0, 4.0)
    b = CircleInterval(3.0, 4.0)
    pieces = a.intersect(b)
    assert len(pieces) == 2
    assert sorted(round(p.extent, 9) for p in pieces) == [round(7.0 - TAU, 9), 1.0]


def test_solve_two_radial(two_radial):
    rep = solve_locked_order(two_radial)
    assert rep.status == "optimal"
    assert rep.objective == pytest.approx(1.2)
    assert all(ld.direction is Direction.RADIAL for ld in rep.labeling.leaders)


@pytest.mark.parametrize("seed", range(10))
def test_rotation_equivalence_over_k(seed):
    base = gen_random(seed, 5, Variant(order="locked"))
    w = TAU / 5
    reps = {k: solve_locked_order(base.with_variant(k=k)) for k in (0.0, 0.7)}
    assert reps[0.0].status == reps[0.7].status
    if reps[0.0].status == "optimal":
        assert reps[0.0].objective == pytest.approx(reps[0.7].objective, rel=1e-9)
        for fid in base.ids:
            a, b = reps[0.0].labeling.label(fid), reps[0.7].labeling.label(fid)
            assert a.port == pytest.approx(b.port, abs=1e-9)
            assert math.remainder(a.start - b.start - 0.7 * w, TAU) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("variant", LOCKED_VARIANTS)
def test_solver_matches_oracle(variant):
    for seed in range(10):
        inst = gen_random(seed, 2 + seed % 5, variant)
        rep = solve_locked_order(inst)
        ref = oracle_locked_order_free(inst)
        assert rep.status == ref.status
        if ref.status == "optimal":
            assert rep.objective == pytest.approx(ref.objective, rel=1e-6)
            assert validate_labeling(inst, rep.labeling).ok
            cands = rep.details["candidates"]
            assert cands >= 1


def test_engineered_infeasible_instance():
    inst = gen_random(14, 5, Variant(order="locked"))
    rep = solve_locked_order(inst)
    assert rep.status == "infeasible"
    assert oracle_locked_order_free(inst).status == "infeasible"
    assert rep.labeling is None


def test_unsupported_variants():
    with pytest.raises(UnsupportedVariant):
        solve_locked_order(gen_random(1, 3))
    with pytest.raises(UnsupportedVariant):
        solve_locked_order(gen_random(1, 3, Variant(order="locked", sizes="nonuniform", ratios="uniform-free")))
    with pytest.raises(DegenerateInput):
        feats = [("a", 0.3, 0.0, math.pi), ("b", 0.3, 1.0, math.pi)]
        solve_locked_order(make_instance(TAU, feats, Variant(order="locked"), order=["a", "b"]))


def test_minimizer_is_a_candidate_rotation():
    for seed in range(10):
        inst = gen_random(seed, 4, Variant(order="locked"))
        rep = solve_locked_order(inst)
        if rep.status != "optimal":
            continue
        phi = rep.details["rotation"]
        fixed = {(f.angle - (lb.port - rep.labeling.label(inst.ids[0]).port)) % TAU
                 for f in inst.features for lb in rep.labeling.labels}
        ends = {a % TAU for arc in rep.details["feasible_arcs"] for a in (arc[0], arc[0] + arc[1])}
        assert min(abs(math.remainder(phi - x, TAU)) for x in fixed | ends) < 1e-7
