"""``cheb-bounds``: command-line reports on instance files.

Exit codes: 0 success, 1 precondition or configuration error, 2 unreadable
or malformed input, 3 a failed identity check or a bound counterexample.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from .bounds import BRANCHES, THEOREM_BRANCHES, THEOREMS, compare_all
from .errors import ChebyshevError, CounterexampleFound
from .extremal import SearchConfig, random_search
from .functional import chebyshev, identity_residuals, kernel_residual
from .instances import Instance, InstanceParseError, dumps, format_float, instance_to_document, load_instance
from .jensen import BUILTIN_MODELS, jensen_report, psd_quadratic

EXIT_OK, EXIT_PRECONDITION, EXIT_PARSE, EXIT_CHECK = 0, 1, 2, 3
DEFAULT_TOLERANCE = 1e-9


class UsageError(Exception):
    """Bad flags or configuration (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- subcommands -----------------------------------------------------------
# each returns (exit code, report dict)

def _load(path) -> Instance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise InstanceParseError(str(path), exc.strerror or str(exc)) from exc


def _require_y(inst: Instance) -> Instance:
    if inst.y is None:
        raise UsageError("instance has no 'y' sequence")
    return inst


def cmd_functional(args):
    inst = _require_y(_load(args.input))
    value = complex(chebyshev(inst.weight_vector(), inst.x, inst.y))
    return EXIT_OK, {
        "command": "functional",
        "field": inst.field,
        "n": inst.n,
        "dimension": inst.dimension,
        "value": {"re": value.real, "im": value.imag, "modulus": abs(value)},
    }


def cmd_identities(args):
    inst = _require_y(_load(args.input))
    w = inst.weight_vector()
    tol = args.tolerance
    residuals, skipped = {}, {}
    for name, r in identity_residuals(w, inst.x, inst.y).items():
        if isinstance(r, str):
            residuals[name], skipped[name] = None, r
        else:
            residuals[name] = r
    kres = kernel_residual(w, inst.x)
    failed = [k for k, r in residuals.items() if r is not None and not r <= tol]
    if not kres <= tol:
        failed.append("kernel")
    report = {
        "command": "identities",
        "tolerance": tol,
        "residuals": residuals,
        "kernel_residual": kres,
        "skipped": skipped,
        "failed": failed,
        "ok": not failed,
    }
    return (EXIT_CHECK if failed else EXIT_OK), report


def _theorem_list(choice: str) -> tuple[str, ...]:
    if choice == "all":
        return THEOREMS
    ids = tuple(t.strip() for t in choice.split(",") if t.strip())
    unknown = [t for t in ids if t not in THEOREMS]
    if unknown or not ids:
        raise UsageError(f"unknown theorem id(s) {unknown or [choice]}; choose from {', '.join(THEOREMS)} or 'all'")
    return ids


def cmd_bounds(args):
    theorems = _theorem_list(args.theorems)
    inst = _require_y(_load(args.input))
    reports = compare_all(inst.weight_vector(), inst.x, inst.y, inst.ex, inst.ey, args.p, theorems)
    return EXIT_OK, {
        "command": "bounds",
        "exponent": args.p,
        "functional": reports[0].functional if reports else None,
        "bounds": [r.to_dict() for r in reports],
    }


def _model(args, dim: int):
    if args.function not in BUILTIN_MODELS:
        raise UsageError(f"unknown function {args.function!r}; choose from {', '.join(BUILTIN_MODELS)}")
    if args.function != "psd-quadratic":
        return BUILTIN_MODELS[args.function]()
    if args.matrix is None:
        return psd_quadratic(np.eye(dim))
    try:
        with open(args.matrix, encoding="utf-8") as fh:
            Q = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceParseError(str(args.matrix), str(exc)) from exc
    return psd_quadratic(Q)


def cmd_jensen(args):
    branches = BRANCHES if args.branch == "all" else (args.branch,)
    if args.branch != "all" and args.branch not in BRANCHES:
        raise UsageError(f"unknown branch {args.branch!r}")
    inst = _load(args.input)
    F = _model(args, inst.dimension)
    w = inst.weight_vector()
    report = jensen_report(w, inst.x, F, branches, args.p, uniform=w.is_uniform())
    return EXIT_OK, {"command": "jensen", "function": args.function, **report.to_dict()}


def _witness_document(inst: Instance, cfg: SearchConfig, ratio: float) -> dict:
    meta = {"bound": cfg.bound, "branch": cfg.branch, "exponent": cfg.exponent, "ratio": ratio}
    return instance_to_document(inst, meta=meta)


def cmd_extremal(args):
    try:
        cfg = SearchConfig(
            bound=args.bound,
            branch=args.branch,
            n=args.n,
            dim=args.dim,
            trials=args.trials,
            seed=args.seed,
            scale=args.scale,
            exponent=args.p,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        result = random_search(cfg)
    except CounterexampleFound as exc:
        return EXIT_CHECK, {
            "command": "extremal",
            "config": asdict(cfg),
            "counterexample": _witness_document(exc.instance, cfg, exc.ratio),
            "ratio": exc.ratio,
        }
    witness = None
    if result.witness is not None:
        witness = _witness_document(result.witness, cfg, result.best_ratio)
        if args.witness_out:
            with open(args.witness_out, "w", encoding="utf-8") as fh:
                fh.write(dumps(witness) + "\n")
    return EXIT_OK, {
        "command": "extremal",
        "config": asdict(cfg),
        "best_ratio": result.best_ratio,
        "sampled_ratio": result.sampled_ratio,
        "best_trial": result.best_trial,
        "history": result.history,
        "witness": witness,
    }


# -- output ----------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _bound_table(report: dict) -> list[str]:
    header = ("theorem", "branch", "value", "ratio", "status")
    rows = [header]
    for r in report["bounds"]:
        status = "ok" if r["preconditions_ok"] else r["diagnostic"]
        rows.append((r["theorem"], r["branch"], _cell(r["value"]), _cell(r["ratio"]), status))
    widths = [max(len(row[k]) for row in rows) for k in range(len(header) - 1)]
    lines = [f"|T_n| = {_cell(report['functional'])}"]
    lines += ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)) + "  " + row[-1] for row in rows]
    return lines


def _flat(prefix: str, obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flat(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flat(f"{prefix}[{i}]", v, out)
    elif isinstance(obj, list):
        out.append(f"{prefix}: " + " ".join(_cell(v) for v in obj))
    else:
        out.append(f"{prefix}: {_cell(obj)}")


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report) + "\n"
    if report.get("command") == "bounds":
        lines = _bound_table(report)
    else:
        lines = []
        _flat("", report, lines)
    return "\n".join(lines) + "\n"


# -- argument parsing ------------------------------------------------------

def _global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    # sub-parsers use SUPPRESS so a flag given before the subcommand is not reset
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--tolerance", type=float, default=d(DEFAULT_TOLERANCE), help="identity residual tolerance")
    parser.add_argument("--format", choices=("json", "table"), default=d("json"))
    parser.add_argument("--output", default=d(None), help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cheb-bounds", description=__doc__.splitlines()[0])
    _global_flags(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("functional", help="T_n(p; x, y) of an instance")
    p.add_argument("input")
    p.set_defaults(func=cmd_functional)

    p = sub.add_parser("identities", help="check the representation identities")
    p.add_argument("input")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("bounds", help="evaluate and rank the bound families")
    p.add_argument("input")
    p.add_argument("--theorems", default="all", help="comma-separated ids or 'all'")
    p.add_argument("--p", type=float, default=2.0, help="Hölder exponent (> 1)")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("jensen", help="Jensen gap and reverse bounds (points under 'x')")
    p.add_argument("input")
    p.add_argument("--function", default="norm-squared")
    p.add_argument("--matrix", help="JSON matrix for psd-quadratic (default identity)")
    p.add_argument("--branch", default="all")
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=cmd_jensen)

    p = sub.add_parser("extremal", help="randomised search for the worst ratio |T_n| / bound")
    p.add_argument("--bound", required=True)
    p.add_argument("--branch", default=None, help="default: first branch of the bound")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--scale", type=float, default=0.5, help="initial hill-climbing step")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--witness-out", help="also write the witness instance here")
    p.set_defaults(func=cmd_extremal)

    for action in sub.choices.values():
        _global_flags(action, top=False)
    return parser


def _default_branch(args) -> None:
    if getattr(args, "command", None) == "extremal" and args.branch is None:
        if args.bound not in THEOREM_BRANCHES:
            raise UsageError(f"unknown bound id {args.bound!r}")
        args.branch = THEOREM_BRANCHES[args.bound][0]


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _default_branch(args)
        code, report = args.func(args)
    except UsageError as exc:
        print(f"cheb-bounds: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InstanceParseError as exc:
        print(f"cheb-bounds: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ChebyshevError as exc:
        print(f"cheb-bounds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = render(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
