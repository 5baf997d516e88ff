from __future__ import annotations

import contextlib
import io
import json
import math
import re
import xml.etree.ElementTree as ET

import pytest

from orbital_labeling.cli import run_cli
from orbital_labeling.errors import InvalidArgument
from orbital_labeling.generators import gen_random
from orbital_labeling.geometry import TAU, Label, Labeling
from orbital_labeling.instance import Variant
from orbital_labeling.io import parse_document, parse_labeling, serialize_instance, serialize_labeling
from orbital_labeling.render import RenderStyle, render_svg
from orbital_labeling.solve import solve
from orbital_labeling.validation import validate_labeling

NS = "{http://www.w3.org/2000/svg}"


def _count(svg: str, tag: str, cls: str) -> int:
    root = ET.fromstring(svg.encode())
    return sum(1 for el in root.iter(NS + tag) if el.get("class") == cls)


def test_instance_only():
    svg = render_svg(gen_random(0, 5))
    assert _count(svg, "circle", "boundary") == 1
    assert _count(svg, "circle", "feature") == 5
    assert _count(svg, "path", "leader") == 0


def test_with_labeling():
    inst = gen_random(0, 5)
    svg = render_svg(inst, solve(inst).labeling)
    assert _count(svg, "circle", "boundary") == 1
    assert _count(svg, "circle", "feature") == 5
    assert _count(svg, "path", "leader") == 5
    assert _count(svg, "path", "label") == 5


def test_deterministic_bytes():
    inst = gen_random(3, 6, Variant(ports="locked"))
    lab = solve(inst).labeling
    style = RenderStyle(show_split=True)
    assert render_svg(inst, lab, style).encode() == render_svg(inst, lab, style).encode()
    assert _count(render_svg(inst, lab, style), "line", "candidate") == 12


def test_dangling_feature():
    inst = gen_random(0, 2)
    bad = Labeling([Label("ghost", 0.0, math.pi, 0.0)], [], 0.0)
    with pytest.raises(InvalidArgument):
        render_svg(inst, bad)


def test_label_arc_extent():
    """The outer arc endpoints subtend exactly the label extent."""
    inst = gen_random(5, 4, Variant(sizes="nonuniform", order="locked", ratios="nonuniform-locked"))
    lab = solve(inst).labeling
    style = RenderStyle(size=1000)
    svg = render_svg(inst, lab, style)
    root = ET.fromstring(svg.encode())
    c = style.size / 2
    for el in root.iter(NS + "path"):
        if el.get("class") != "label":
            continue
        nums = [float(x) for x in re.findall(r"-?\d+(?:\.\d+)?", el.get("d"))]
        x0, y0 = nums[0], nums[1]
        x1, y1 = nums[7], nums[8]
        a0 = math.atan2(c - y0, x0 - c)
        a1 = math.atan2(c - y1, x1 - c)
        sweep = (a1 - a0) % TAU
        extent = float(el.get("data-extent"))
        if extent < TAU - 1e-9:
            assert sweep == pytest.approx(extent, abs=2e-3)
        assert nums[6] == 0  # sweep flag: counter-clockwise on screen


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_exit_codes(tmp_path, capsys):
    inst_path = _write(tmp_path, "i.json", serialize_instance(gen_random(1, 5)))
    assert run_cli(["solve", inst_path]) == 0
    assert run_cli(["validate", inst_path]) == 0
    assert run_cli(["solve", inst_path, "--bogus"]) == 64
    assert run_cli([]) == 64
    hard = _write(tmp_path, "h.json", serialize_instance(gen_random(1, 30, Variant(sizes="nonuniform"))))
    assert run_cli(["solve", hard]) == 3
    assert "NP-hard" in capsys.readouterr().err
    infeasible = _write(tmp_path, "x.json", serialize_instance(gen_random(14, 5, Variant(order="locked"))))
    assert run_cli(["solve", infeasible]) == 2
    assert run_cli(["solve", str(tmp_path / "missing.json")]) == 64
    assert run_cli(["solve", _write(tmp_path, "bad.json", "{not json")]) == 2


def test_pipeline(tmp_path, capsys, monkeypatch):
    gad = tmp_path / "g.json"
    assert run_cli(["gen", "partition", "--set", "1,1,2", "--out", str(gad)]) == 0
    assert "threshold k" in capsys.readouterr().err
    out = tmp_path / "bundle.json"
    assert run_cli(["solve", str(gad)]) == 0
    bundle = capsys.readouterr().out
    out.write_text(bundle)
    doc = json.loads(bundle)
    assert doc["status"] == "optimal" and doc["solver"] == "exhaustive"
    assert doc["objective"] < json.loads(gad.read_text())["threshold"]
    assert run_cli(["validate", str(out)]) == 0
    assert capsys.readouterr().out.strip().endswith("ok")


def test_corrupted_port(tmp_path):
    inst = gen_random(2, 5, Variant(ports="locked"))
    i = _write(tmp_path, "i.json", serialize_instance(inst))
    lab = tmp_path / "l.json"
    assert run_cli(["solve", i, "--out", str(lab)]) == 0
    assert run_cli(["validate", i, "--labeling", str(lab)]) == 0
    doc = json.loads(lab.read_text())
    doc["leaders"][0]["port"] += 0.3
    lab.write_text(json.dumps(doc))
    assert run_cli(["validate", i, "--labeling", str(lab)]) == 2


def test_variant_override(tmp_path, capsys):
    i = _write(tmp_path, "i.json", serialize_instance(gen_random(2, 4)))
    assert run_cli(["solve", i, "--variant", "sizes=nonuniform,ratios=nonuniform-free"]) == 3
    assert run_cli(["solve", i, "--variant", "flavor=x"]) == 64
    assert run_cli(["solve", i, "--variant", "order=sideways"]) == 64


def test_gen_and_render(tmp_path):
    inst = tmp_path / "r.json"
    assert run_cli(["gen", "random", "--seed", "3", "--n", "6", "--variant", "ports=locked", "--out", str(inst)]) == 0
    bundle = tmp_path / "b.json"

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert run_cli(["solve", str(inst)]) == 0
    bundle.write_text(buf.getvalue())
    svg = tmp_path / "o.svg"
    assert run_cli(["render", str(bundle), "--out", str(svg), "--split"]) == 0
    assert _count(svg.read_text(), "path", "leader") == 6
    assert run_cli(["render", str(bundle)]) == 64


SUPPORTED = [
    Variant(order="locked"),
    Variant(order="locked", k=0.5),
    Variant(order="locked", sizes="nonuniform", ratios="nonuniform-locked"),
    Variant(),
    Variant(ratios="uniform-free"),
    Variant(ports="locked", order="locked"),
    Variant(ports="locked"),
    Variant(ports="locked", ratios="uniform-free"),
    Variant(sizes="nonuniform"),
]


@pytest.mark.parametrize("variant", SUPPORTED, ids=lambda v: v.describe())
def test_round_trip(variant):
    n_max = 5 if variant.sizes.value == "nonuniform" and variant.order.value == "free" else 7
    for seed in range(50 if n_max == 7 else 8):
        inst = gen_random(seed, 2 + seed % (n_max - 1), variant)
        rep = solve(inst)
        if rep.labeling is None:
            continue
        again = parse_labeling(serialize_labeling(rep.labeling))
        inst2, _ = parse_document(serialize_instance(inst))
        assert again == rep.labeling
        report = validate_labeling(inst2, again)
        assert not report.of_kind("crossing")
        if not rep.diagnostics or rep.solver == "exhaustive":
            assert report.ok, report.summary()
