from __future__ import annotations

import math

import pytest
from hypothesis import settings

from orbital_labeling.instance import Variant, make_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def two_radial():
    """Two features opposite each other with half-circle labels."""
    feats = [("p1", 0.2, 0.0, math.pi), ("p2", 0.6, math.pi, math.pi)]
    return make_instance(2 * math.pi, feats, Variant(order="locked"), order=["p1", "p2"])


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config._acceptance_lines

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
