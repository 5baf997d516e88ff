"""Route an instance to the exact method for its variant."""

from __future__ import annotations

from .candidates import solve_free_order_locked_ports, solve_locked_order_locked_ports
from .errors import OracleRefused, UnsupportedVariant
from .free_order import solve_free_order_uniform
from .geometry import ANGLE_TOL
from .instance import Instance, Mode, Ratios, Sizes
from .oracle import (
    MAX_ROTATION_FEATURES,
    oracle_free_order,
    oracle_locked_candidates,
    oracle_locked_order_free,
)
from .report import UNSUPPORTED, SolveReport
from .rotation import solve_locked_order

NP_HARD = "weakly NP-hard (reduction from PARTITION)"


def _uniform_ratio(instance: Instance) -> bool:
    return instance.variant.ratios in (Ratios.UNIFORM_LOCKED, Ratios.UNIFORM_FREE)


def np_hard(instance: Instance) -> bool:
    """Free ports, free order and mixed label sizes with equal or fixed ratios."""
    v = instance.variant
    return (
        v.ports is Mode.FREE
        and v.order is Mode.FREE
        and v.sizes is Sizes.NONUNIFORM
        and v.ratios is not Ratios.NONUNIFORM_FREE
    )


def pick_solver(instance: Instance):
    """The exact solver for the instance's variant; raises UnsupportedVariant for open or hard cells."""
    v = instance.variant
    if v.ratios is Ratios.NONUNIFORM_FREE:
        raise UnsupportedVariant(f"no exact method known for {v.describe()}")
    if v.ports is Mode.FREE:
        if v.order is Mode.LOCKED:
            return solve_locked_order
        if v.sizes is Sizes.UNIFORM and _uniform_ratio(instance):
            return solve_free_order_uniform
        if np_hard(instance):
            if instance.n <= MAX_ROTATION_FEATURES:
                return _exhaustive
            raise UnsupportedVariant(
                f"{v.describe()} is {NP_HARD}; exhaustive search is limited to {MAX_ROTATION_FEATURES} features, got {instance.n}"
            )
        raise UnsupportedVariant(f"no exact method known for {v.describe()}")
    if v.order is Mode.LOCKED:
        return solve_locked_order_locked_ports
    if v.sizes is Sizes.UNIFORM and _uniform_ratio(instance):
        return solve_free_order_locked_ports
    raise UnsupportedVariant(f"no exact method known for {v.describe()}")


def _exhaustive(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    res = oracle_free_order(instance, strict=strict, tol=tol)
    return SolveReport(
        res.status,
        res.labeling,
        res.objective,
        solver="exhaustive",
        diagnostics=[f"{NP_HARD}; solved by exhaustive search over {res.search_space} configurations"],
    )


def solve(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    """Solve with the matching exact method, or report the variant as unsupported.

    Malformed or degenerate instances still raise.
    """
    try:
        fn = pick_solver(instance)
        return fn(instance, strict=strict, tol=tol)
    except UnsupportedVariant as e:
        return SolveReport(UNSUPPORTED, diagnostics=[str(e)])


def run_oracle(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL) -> SolveReport:
    """Brute-force counterpart of :func:`solve`."""
    v = instance.variant
    try:
        if v.ports is Mode.LOCKED:
            res = oracle_locked_candidates(instance, strict=strict, tol=tol)
        elif v.order is Mode.LOCKED:
            res = oracle_locked_order_free(instance, strict=strict, tol=tol)
        else:
            res = oracle_free_order(instance, strict=strict, tol=tol)
    except (UnsupportedVariant, OracleRefused) as e:
        return SolveReport(UNSUPPORTED, solver="oracle", diagnostics=[str(e)])
    return SolveReport(
        res.status,
        res.labeling,
        res.objective,
        solver="oracle",
        details={"search_space": res.search_space, "grid": res.grid},
    )
