"""Command-line entry point.

Exit codes: 0 optimal or clean, 2 infeasible or violations, 3 unsupported
variant, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import DegenerateInput, InvalidArgument, ParseError
from .generators import gen_partition_gadget, gen_random
from .geometry import ANGLE_TOL
from .instance import Variant
from .io import bundle_to_text, dumps, instance_to_dict, parse_document, parse_labeling, serialize_labeling
from .render import RenderStyle, render_svg
from .report import INFEASIBLE, OPTIMAL, UNSUPPORTED
from .solve import run_oracle, solve
from .validation import validate_instance, validate_labeling

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_UNSUPPORTED = 3
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _variant_arg(text: str) -> dict:
    """``ports=locked,order=free,k=0.5`` style overrides."""
    out: dict = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise argparse.ArgumentTypeError(f"expected key=value, got {part!r}")
        key, val = (s.strip() for s in part.split("=", 1))
        if key not in ("ports", "order", "sizes", "ratios", "k"):
            raise argparse.ArgumentTypeError(f"unknown variant key {key!r}")
        out[key] = float(val) if key == "k" else val
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load(args):
    inst, lab = parse_document(_read(args.input))
    if getattr(args, "variant", None):
        from dataclasses import replace

        inst = replace(inst, variant=Variant(**{**_variant_fields(inst.variant), **args.variant}))
    return inst, lab


def _variant_fields(v: Variant) -> dict:
    return {"ports": v.ports, "order": v.order, "sizes": v.sizes, "ratios": v.ratios, "k": v.k, "K": v.K}


def _status_exit(status: str) -> int:
    return {OPTIMAL: EXIT_OK, INFEASIBLE: EXIT_VIOLATION, UNSUPPORTED: EXIT_UNSUPPORTED}[status]


def _cmd_solve(args, runner) -> int:
    inst, _ = _load(args)
    rep = runner(inst, strict=args.strict, tol=args.tolerance)
    for d in rep.diagnostics:
        print(d, file=sys.stderr)
    if rep.status == UNSUPPORTED:
        print(f"unsupported variant: {inst.variant.describe()}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if args.out:
        if rep.labeling is not None:
            _write(args.out, serialize_labeling(rep.labeling))
        print(f"status: {rep.status}" + (f" objective: {rep.objective!r}" if rep.objective is not None else ""), file=sys.stderr)
    else:
        _write(None, bundle_to_text(inst, rep))
    return _status_exit(rep.status)


def _cmd_validate(args) -> int:
    inst, lab = _load(args)
    if args.labeling:
        lab = parse_labeling(_read(args.labeling))
    if lab is None:
        rep = validate_instance(inst, strict=args.strict, tol=args.tolerance)
    else:
        rep = validate_labeling(inst, lab, strict=args.strict, tol=args.tolerance)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for v in rep.violations:
        print(f"{v.kind}: {v.message}")
    if rep.ok:
        print("ok")
        return EXIT_OK
    return EXIT_VIOLATION


def _cmd_gen(args) -> int:
    if args.kind == "random":
        fields = {"ports": "free", "order": "free", "sizes": "uniform", "ratios": "uniform-locked"}
        fields.update(args.variant or {})
        inst = gen_random(args.seed, args.n, Variant(**fields), args.radii)
        _write(args.out, dumps(instance_to_dict(inst)))
        return EXIT_OK
    if not args.set:
        raise _UsageError("gen partition needs --set")
    inst, k = gen_partition_gadget(args.set, args.ratios)
    doc = instance_to_dict(inst)
    doc["threshold"] = k
    _write(args.out, dumps(doc))
    print(f"threshold k = {k!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_render(args) -> int:
    inst, lab = _load(args)
    if args.labeling:
        lab = parse_labeling(_read(args.labeling))
    style = RenderStyle(size=args.size, show_candidates=not args.no_candidates, show_split=args.split)
    _write(args.out, render_svg(inst, lab, style))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True, help="reject equal feature radii (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false", help="accept equal feature radii")
    common.add_argument("--tolerance", type=float, default=ANGLE_TOL, help="angular tolerance in radians")

    p = _Parser(prog="orbital-labeling", description="Exact orbital boundary labeling solvers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("solve", "solve an instance with its exact method"), ("oracle", "solve by brute force")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input", nargs="?", default="-", help="instance or bundle file, - for stdin")
        s.add_argument("--out", help="write the labeling here instead of a bundle on stdout")
        s.add_argument("--variant", type=_variant_arg, help="override, e.g. ports=free,order=locked")

    s = sub.add_parser("validate", parents=[common], help="check an instance or a labeling")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--labeling", help="labeling file; otherwise the one inside a bundle is used")

    s = sub.add_parser("gen", parents=[common], help="generate instances")
    s.add_argument("kind", choices=["random", "partition"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--variant", type=_variant_arg)
    s.add_argument("--radii", choices=["stratified", "sqrt"], default="stratified")
    s.add_argument("--set", type=_int_list)
    s.add_argument("--ratios", choices=["uniform-locked", "uniform-free", "nonuniform-locked"], default="uniform-locked")
    s.add_argument("--out")

    s = sub.add_parser("render", parents=[common], help="draw an SVG")
    s.add_argument("input", nargs="?", default="-")
    s.add_argument("--labeling")
    s.add_argument("--out", required=True)
    s.add_argument("--size", type=int, default=600)
    s.add_argument("--no-candidates", action="store_true")
    s.add_argument("--split", action="store_true", help="draw a radius crossed by no leader")
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    try:
        if args.command == "solve":
            return _cmd_solve(args, solve)
        if args.command == "oracle":
            return _cmd_solve(args, run_oracle)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_render(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DegenerateInput, InvalidArgument) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as e:
        # bad enum values in overrides and the like
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
