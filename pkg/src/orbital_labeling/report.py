from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import DegenerateInput, InvalidArgument
from .geometry import ANGLE_TOL, Labeling
from .instance import Instance

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNSUPPORTED = "unsupported-variant"


@dataclass
class SolveReport:
    status: str
    labeling: Labeling | None = None
    objective: float | None = None
    solver: str = ""
    diagnostics: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def require_valid(instance: Instance, *, strict: bool = True, tol: float = ANGLE_TOL, allow=()) -> list[str]:
    """Raise on malformed instances; return the kinds of tolerated violations."""
    from .validation import validate_instance

    rep = validate_instance(instance, strict=strict, tol=tol)
    degenerate = rep.of_kind("degenerate")
    if degenerate:
        raise DegenerateInput("; ".join(v.message for v in degenerate))
    fatal = [v for v in rep.violations if v.kind not in allow]
    if fatal:
        raise InvalidArgument("invalid instance: " + "; ".join(v.message for v in fatal))
    return sorted({v.kind for v in rep.violations})
