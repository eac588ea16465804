"""Command line entry point: ``torsion``, ``verify`` and ``circle-table``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input (schema,
structure, positivity, arguments), 3 exactness violation, 4 quadrature did
not converge.
"""

from __future__ import annotations

import argparse
import json
import sys

from .circle_model import circle_table_rows, write_circle_table
from .datafiles import BASES, load_complex
from .errors import (
    ConvergenceError,
    DomainError,
    ExactnessError,
    PositivityError,
    SchemaError,
    StructuralError,
)
from .suites import DEFAULTS, SUITES, run_suites
from .torsion import torsion_form

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_EXACTNESS, EXIT_CONVERGENCE = 0, 1, 2, 3, 4


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or name not in DEFAULTS:
        raise argparse.ArgumentTypeError(f"expected NAME=TOL with NAME in {', '.join(DEFAULTS)}, got {text!r}")
    try:
        return name, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance {value!r}") from None


def cmd_torsion(args) -> int:
    cx = load_complex(args.file, args.base, args.grid)
    result = torsion_form(cx, args.tol, method=args.method)
    _emit(result.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = dict(args.set or [])
    reports = run_suites(args.suites, overrides)
    ok = all(r.passed for r in reports)
    _emit({"pass": ok, "suites": [r.to_json(args.timing) for r in reports]}, args.out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_circle_table(args) -> int:
    rows = circle_table_rows(args.n, args.kmax)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_circle_table(rows, fh)
    else:
        write_circle_table(rows, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torsionlab", description="Higher torsion forms of flat complexes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("torsion", help="torsion form of a complex given as JSON")
    p.add_argument("file")
    p.add_argument("--base", choices=list(BASES), default=None, help="overrides the 'base' key of the file")
    p.add_argument("--grid", type=int, default=None, help="grid points per axis (default 64 on T^1, 32 on T^2)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--method", choices=["spectral", "algebra"], default="spectral")
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("suites", nargs="+", choices=["all", *SUITES])
    p.add_argument("--set", action="append", type=_parse_override, metavar="NAME=TOL",
                   help="override a suite tolerance; repeatable")
    p.add_argument("--timing", action="store_true", help="include wall times (makes output run-dependent)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("circle-table", help="CSV of circle-bundle torsion coefficients")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, default=7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_circle_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and "all" in args.suites:
        args.suites = ["all"]
    try:
        return args.func(args)
    except ExactnessError as exc:
        where = f" (degree {exc.degree})" if exc.degree is not None else ""
        print(f"error: exactness violated{where}: {exc}", file=sys.stderr)
        return EXIT_EXACTNESS
    except ConvergenceError as exc:
        print(f"error: quadrature did not converge: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(json.dumps(exc.report.to_json()), file=sys.stderr)
        return EXIT_CONVERGENCE
    except (SchemaError, StructuralError, PositivityError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
