"""JSON instance and labeling files.

Floats are written with 17 significant digits so every value survives a
round trip bit for bit.
"""

from __future__ import annotations

import json
import math
from typing import Any

from .errors import ParseError
from .geometry import Direction, Label, Labeling, Leader, PolarPoint
from .instance import Feature, Instance, Variant


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite number {obj}")
        text = "%.17g" % obj
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_emit(x, indent, level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + _emit(x, indent, level + 1) for x in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _emit(obj, indent, 0) + "\n"


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}: {e.msg}", "document") from None


def _get(d: Any, key: str, path: str, kind=None, required: bool = True):
    where = f"{path}.{key}" if path else key
    if not isinstance(d, dict):
        raise ParseError("expected an object", path or "document")
    if key not in d:
        if required:
            raise ParseError("missing required field", where)
        return None
    val = d[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ParseError(f"expected a number, got {val!r}", where)
        return float(val)
    if kind is str and not isinstance(val, (str, int)):
        raise ParseError(f"expected a string, got {val!r}", where)
    if kind is list and not isinstance(val, list):
        raise ParseError("expected an array", where)
    if kind is dict and not isinstance(val, dict):
        raise ParseError("expected an object", where)
    return str(val) if kind is str else val


# instance files


def instance_to_dict(instance: Instance) -> dict:
    v = instance.variant
    var: dict[str, Any] = {
        "ports": v.ports.value,
        "order": v.order.value,
        "sizes": v.sizes.value,
        "ratios": v.ratios.value,
    }
    if v.k is not None:
        var["k"] = v.k
    if v.K is not None:
        var["K"] = list(v.K)
    out: dict[str, Any] = {
        "circumference": instance.circumference,
        "features": [{"id": f.id, "r": f.r, "angle": f.angle, "lambda": f.length} for f in instance.features],
        "variant": var,
    }
    if instance.candidates is not None:
        out["candidates"] = list(instance.candidates)
    if instance.order is not None:
        out["order"] = list(instance.order)
    return out


def serialize_instance(instance: Instance) -> str:
    return dumps(instance_to_dict(instance))


def _parse_variant(d: dict, path: str) -> Variant:
    kw: dict[str, Any] = {}
    for key in ("ports", "order", "sizes", "ratios"):
        val = _get(d, key, path, str, required=False)
        if val is not None:
            kw[key] = val
    k = _get(d, "k", path, float, required=False)
    if k is not None:
        kw["k"] = k
    K = _get(d, "K", path, list, required=False)
    if K is not None:
        kw["K"] = tuple(_num(x, f"{path}.K[{i}]") for i, x in enumerate(K))
    try:
        return Variant(**kw)
    except ValueError as e:
        raise ParseError(str(e), path) from None


def _num(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {x!r}", where)
    return float(x)


def _parse_feature(d: Any, path: str) -> Feature:
    fid = _get(d, "id", path, str)
    lam = _get(d, "lambda", path, float)
    if "r" in d or "angle" in d:
        r = _get(d, "r", path, float)
        a = _get(d, "angle", path, float)
        try:
            pt = PolarPoint(r, a)
        except ValueError as e:
            raise ParseError(str(e), f"{path}.r") from None
    elif "x" in d or "y" in d:
        pt = PolarPoint.from_cartesian(_get(d, "x", path, float), _get(d, "y", path, float))
    else:
        raise ParseError("missing required field", f"{path}.r")
    return Feature(fid, pt, lam)


def instance_from_dict(d: Any) -> Instance:
    if not isinstance(d, dict):
        raise ParseError("expected an object", "document")
    C = _get(d, "circumference", "", float)
    feats = _get(d, "features", "", list)
    features = tuple(_parse_feature(f, f"features[{i}]") for i, f in enumerate(feats))
    variant = _parse_variant(_get(d, "variant", "", dict, required=False) or {}, "variant")
    cands = _get(d, "candidates", "", list, required=False)
    if cands is not None:
        cands = tuple(_num(x, f"candidates[{i}]") for i, x in enumerate(cands))
    order = _get(d, "order", "", list, required=False)
    if order is not None:
        order = tuple(str(x) for x in order)
    return Instance(C, features, variant, cands, order)


def parse_instance(text: str) -> Instance:
    return instance_from_dict(_loads(text))


# labeling files


def labeling_to_dict(labeling: Labeling) -> dict:
    return {
        "labels": [{"id": lb.feature, "start": lb.start, "extent": lb.extent, "port": lb.port} for lb in labeling.labels],
        "leaders": [
            {"id": ld.feature, "direction": ld.direction.value, "span": ld.span, "port": ld.port}
            for ld in labeling.leaders
        ],
        "objective": labeling.objective,
    }


def serialize_labeling(labeling: Labeling) -> str:
    return dumps(labeling_to_dict(labeling))


def labeling_from_dict(d: Any) -> Labeling:
    if not isinstance(d, dict):
        raise ParseError("expected an object", "document")
    labels = []
    for i, x in enumerate(_get(d, "labels", "", list)):
        p = f"labels[{i}]"
        labels.append(
            Label(_get(x, "id", p, str), _get(x, "start", p, float), _get(x, "extent", p, float), _get(x, "port", p, float))
        )
    leaders = []
    for i, x in enumerate(_get(d, "leaders", "", list)):
        p = f"leaders[{i}]"
        raw = _get(x, "direction", p, str)
        try:
            direction = Direction(raw)
        except ValueError:
            raise ParseError(f"unknown direction {raw!r}", f"{p}.direction") from None
        leaders.append(Leader(_get(x, "id", p, str), direction, _get(x, "span", p, float), _get(x, "port", p, float)))
    return Labeling(labels, leaders, _get(d, "objective", "", float))


def parse_labeling(text: str) -> Labeling:
    return labeling_from_dict(_loads(text))


# solve output: instance plus labeling in one document


def bundle_to_text(instance: Instance, report) -> str:
    out: dict[str, Any] = {"instance": instance_to_dict(instance), "status": report.status}
    if report.labeling is not None:
        out["labeling"] = labeling_to_dict(report.labeling)
    if report.objective is not None:
        out["objective"] = report.objective
    out["solver"] = report.solver
    out["diagnostics"] = list(report.diagnostics)
    return dumps(out)


def parse_document(text: str) -> tuple[Instance, Labeling | None]:
    """Read either a bare instance or a solve bundle."""
    d = _loads(text)
    if isinstance(d, dict) and "instance" in d:
        inst = instance_from_dict(d["instance"])
        lab = labeling_from_dict(d["labeling"]) if isinstance(d.get("labeling"), dict) else None
        return inst, lab
    return instance_from_dict(d), None
