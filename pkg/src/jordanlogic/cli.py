"""Command-line interface. Every command writes one JSON report.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage, parse or precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from ._config import InconclusiveError, JordanLogicError, Tolerances
from .algebra import Element, parse_algebra, spectral_decompose
from .checks import CHECKS, run_suite
from .lattice import certify_projection, compatible, dim, join, meet
from .reconstruct import reconstruct
from .report import FAIL, INCONCLUSIVE, PASS, combine_verdicts, jsonable

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(text: str):
    """Inline JSON, or the path of a JSON file."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _tolerances(items) -> Tolerances:
    overrides = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        overrides[name.strip()] = float(value)
    try:
        return Tolerances().updated(**overrides)
    except TypeError as exc:
        raise UsageError(f"unknown tolerance in {sorted(overrides)}") from exc


def _element(text: str, algebra=None) -> Element:
    data = _load_json(text)
    if algebra is not None and isinstance(data, dict) and "algebra" not in data:
        data = {**data, "algebra": algebra.spec()}
    el = Element.from_json(data)
    if algebra is not None and el.algebra != algebra:
        raise UsageError(f"element belongs to {el.algebra.label}, not {algebra.label}")
    return el


def _common(p: argparse.ArgumentParser, algebra_required: bool = True) -> None:
    p.add_argument("--algebra", required=algebra_required, help="algebra spec as inline JSON or a file path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override, repeatable")
    p.add_argument("--out", help="also write the report to this path")
    p.add_argument("--pretty", action="store_true", help="human-readable view instead of JSON on stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for reproducible output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jordanlogic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="run property checks")
    _common(p)
    p.add_argument("--suite", default="all", choices=[*CHECKS, "all"])
    p.add_argument("--trials", type=int, default=500)

    p = sub.add_parser("spectral", help="spectral decomposition of an element")
    _common(p, algebra_required=False)
    p.add_argument("element", help="element JSON (inline or path) with 'coords' and optionally 'algebra'")

    p = sub.add_parser("lattice", help="lattice operation on projections")
    _common(p, algebra_required=False)
    p.add_argument("op", choices=["meet", "join", "compat", "dim"])
    p.add_argument("p")
    p.add_argument("q", nargs="?")

    p = sub.add_parser("reconstruct", help="spin-factor reconstruction of a capacity-2 algebra")
    _common(p)
    p.add_argument("--samples", type=int, default=10_000, help="Haar samples for the invariant product")
    p.add_argument("--base", choices=["random", "natural"], default="random")
    p.add_argument("--trials", type=int, default=200, help="random pairs for the Jordan axiom check")
    return parser


def _cmd_check(args, algebra, tol) -> tuple[str, dict]:
    reports = run_suite(algebra, args.suite, args.trials, args.seed, tol)
    verdict = combine_verdicts(reports)
    return verdict, {"suite": args.suite, "trials": args.trials, "reports": [r.to_json() for r in reports]}


def _cmd_spectral(args, algebra, tol) -> tuple[str, dict]:
    a = _element(args.element, algebra)
    sd = spectral_decompose(a, tol)
    err = float(max(abs(sd.reconstruct().coords - a.coords)))
    return PASS, {"algebra": a.algebra.spec(), "decomposition": sd.to_json(), "reconstruction_error": err}


def _cmd_lattice(args, algebra, tol) -> tuple[str, dict]:
    p = certify_projection(_element(args.p, algebra), tol)
    body = {"algebra": p.algebra.spec(), "op": args.op, "p": p.to_json()}
    if args.op == "dim":
        body["result"] = dim(p, tol)
        return PASS, body
    if args.q is None:
        raise UsageError(f"lattice {args.op} needs two projections")
    q = certify_projection(_element(args.q, p.algebra), tol)
    body["q"] = q.to_json()
    if args.op == "meet":
        body["result"] = meet(p, q, tol).to_json()
    elif args.op == "join":
        body["result"] = join(p, q, tol).to_json()
    else:
        body["result"] = compatible(p, q, tol)
    return PASS, body


def _cmd_reconstruct(args, algebra, tol) -> tuple[str, dict]:
    rec = reconstruct(algebra, args.base, args.samples, args.seed, trials=args.trials)
    return rec.verdict, {"samples": args.samples, "base": args.base, "construction": rec.to_json()}


COMMANDS = {"check": _cmd_check, "spectral": _cmd_spectral, "lattice": _cmd_lattice, "reconstruct": _cmd_reconstruct}


def _pretty(report: dict) -> str:
    lines = [f"{report['command']}  verdict={report['verdict']}  seed={report['seed']}"]
    if report.get("algebra"):
        lines.append(f"algebra: {json.dumps(report['algebra'], sort_keys=True)}")
    for r in report.get("reports", []):
        lines.append(f"  {r['property']:<14} {r['verdict']:<13} trials={r['trials']:<5} worst={r['worst_residual']:.3e}")
    if "result" in report:
        lines.append(f"result: {json.dumps(report['result'], sort_keys=True)}")
    if "decomposition" in report:
        lines.append(f"eigenvalues: {report['decomposition']['eigenvalues']}")
    if "construction" in report:
        c = report["construction"]
        lines.append(f"s_o={c['s_o']:.6g}  residual={c['invariance_residual']:.3e}  jordan={c['jordan']['verdict']}")
        lines.append(f"product deviation={c['alignment']['product_deviation']:.3e}")
    if "error" in report:
        lines.append(f"error: {report['error']}")
    return "\n".join(lines)


def _emit(report: dict, args) -> None:
    text = json.dumps(jsonable(report), sort_keys=True, indent=2)
    if args is not None and getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    if args is not None and getattr(args, "pretty", False):
        print(_pretty(report))
    else:
        print(text)


def main(argv=None) -> int:
    args = None
    try:
        args = build_parser().parse_args(argv)
        tol = _tolerances(args.tol)
        algebra = parse_algebra(_load_json(args.algebra)) if args.algebra else None
        report = {
            "command": args.command,
            "seed": args.seed,
            "tolerances": tol.as_dict(),
            "version": __version__,
            "algebra": algebra.spec() if algebra is not None else None,
        }
        if not args.no_timestamp:
            report["timestamp"] = datetime.now(timezone.utc).isoformat()
        verdict, body = COMMANDS[args.command](args, algebra, tol)
        report.update(body)
        report["verdict"] = verdict
        _emit(report, args)
        return EXIT[verdict]
    except (UsageError, ValueError, KeyError, TypeError, OSError, JordanLogicError) as exc:
        if isinstance(exc, InconclusiveError):
            code, verdict = EXIT[INCONCLUSIVE], INCONCLUSIVE
        else:
            code, verdict = EXIT_USAGE, "error"
        err = {"command": getattr(args, "command", None), "seed": getattr(args, "seed", None), "verdict": verdict,
               "error": f"{type(exc).__name__}: {exc}", "version": __version__}
        print(json.dumps(err, sort_keys=True, indent=2), file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
