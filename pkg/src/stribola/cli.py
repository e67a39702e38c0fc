"""Command-line front end: ``stribola {kappa,iterate,verify,figure1}``.

Exit codes: 0 success, 1 a verification check failed, 2 the solver did not
converge, 64 bad usage, 73 an output path could not be written.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures, svg
from .monotone_fn import DEFAULT_TOL, StribolaError, Tolerances, to_csv
from .operators import iterate_T
from .solver import NonConvergenceError, fixed_point_checks, solve
from .suites import SUITES, run_suite

EX_OK = 0
EX_FAIL = 1
EX_NOCONV = 2
EX_USAGE = 64
EX_CANTCREAT = 73

MIN_GRID = 2**3
MAX_GRID = 2**20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be an integer, got {text!r}")
    if n < MIN_GRID or n > MAX_GRID or n & (n - 1):
        raise argparse.ArgumentTypeError(f"grid must be a power of two in [{MIN_GRID}, {MAX_GRID}], got {n}")
    return n


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def _count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if not 0 <= n <= DEFAULT_TOL.max_iter:
        raise argparse.ArgumentTypeError(f"iteration count must lie in [0, {DEFAULT_TOL.max_iter}]")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stribola", description="Fixed point of T f = I(f*) on decreasing functions of [0, 1].")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid_default=DEFAULT_TOL.n_grid):
        p.add_argument("--grid", type=_grid, default=grid_default,
                       help=f"segments of the canonical grid, a power of two (default {grid_default})")
        p.add_argument("--tol-fix", type=_positive, default=DEFAULT_TOL.tol_fix,
                       help="stopping threshold on d_inf between iterates")

    p = sub.add_parser("kappa", help="solve for h and report kappa, its bracket and residuals")
    common(p)
    p.add_argument("--format", choices=("report", "csv", "svg"), default="report",
                   help="what --out receives: the full report, h as CSV, or the figure")
    p.add_argument("--out", help="file to write (stdout gets the summary either way)")
    p.add_argument("--no-extrapolate", action="store_true", help="skip the half-grid companion solve")

    p = sub.add_parser("iterate", help="apply T repeatedly to a seed and tabulate kappa_n")
    common(p)
    p.add_argument("--n", type=_count, default=5, help="number of applications of T (default 5)")
    p.add_argument("--seed", choices=fixtures.SEED_NAMES, default="one", help="seed function (default one)")
    p.add_argument("--format", choices=("csv", "svg", "report"), default="csv",
                   help="csv: one file per iterate; svg: one overlay; report: the trace as CSV")
    p.add_argument("--out", help="directory (csv) or file (svg, report); default: current directory")

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)} or all (default)")
    p.add_argument("--grid", type=_grid, default=None, help="override each suite's own grid size")

    p = sub.add_parser("figure1", help="SVG of h and h' = -h*/kappa")
    common(p)
    p.add_argument("--out", default="figure1.svg", help="output file, '-' for stdout (default figure1.svg)")
    return parser


def _tolerances(args) -> Tolerances:
    return DEFAULT_TOL.with_(n_grid=args.grid, tol_fix=args.tol_fix)


def _write(path: str | Path, text: str):
    if str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _summary(sol) -> str:
    lines = sol.to_report().split("x,value")[0].rstrip("\n").splitlines()
    lines += [str(c) for c in fixed_point_checks(sol)]
    return "\n".join(lines) + "\n"


def cmd_kappa(args) -> int:
    tol = _tolerances(args)
    try:
        sol = solve(tol=tol, extrapolate=not args.no_extrapolate)
    except NonConvergenceError as exc:
        sys.stdout.write(_summary(exc.solution))
        print(f"stribola: {exc}", file=sys.stderr)
        return EX_NOCONV
    sys.stdout.write(_summary(sol))
    if args.out:
        if args.format == "report":
            text = sol.to_report()
        elif args.format == "csv":
            text = to_csv(sol.h)
        else:
            text = svg.figure1(sol.h, sol.kappa)
        _write(args.out, text)
    return EX_OK


def cmd_iterate(args) -> int:
    tol = _tolerances(args)
    f0 = fixtures.seed(args.seed, args.grid)
    keep: list = []
    _, trace = iterate_T(f0, args.n, tol, seed=args.seed, keep=keep)
    print("n,kappa_n,stride")
    for n, k, s in zip(trace.n, trace.kappa, trace.stride):
        print(f"{n},{k:.10f},{s:.10f}")

    if args.format == "csv":
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        for n, f in enumerate(keep):
            _write(out / f"iterate_{n:03d}.csv", to_csv(f))
    elif args.format == "svg":
        out = Path(args.out or "iterates.svg")
        if out.is_dir():
            out = out / "iterates.svg"
        _write(out, svg.iterate_overlay(keep))
    else:
        out = Path(args.out or "trace.csv")
        if out.is_dir():
            out = out / "trace.csv"
        _write(out, trace.to_csv())
    return EX_OK


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    if any(name not in SUITES for name in names):
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or all")
    passed = total = 0
    for name in names:
        print(f"[{name}]")
        for outcome in run_suite(name, args.grid):
            print(outcome)
            total += 1
            passed += outcome.passed
    print(f"passed {passed}/{total}, failed {total - passed}")
    return EX_OK if passed == total else EX_FAIL


def cmd_figure1(args) -> int:
    tol = _tolerances(args)
    try:
        sol = solve(tol=tol, extrapolate=False)
    except NonConvergenceError as exc:
        print(f"stribola: {exc}", file=sys.stderr)
        return EX_NOCONV
    _write(args.out, svg.figure1(sol.h, sol.kappa))
    if args.out != "-":
        print(f"wrote {args.out} (kappa={sol.kappa:.10f})")
    return EX_OK


COMMANDS = {"kappa": cmd_kappa, "iterate": cmd_iterate, "verify": cmd_verify, "figure1": cmd_figure1}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stribola: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except OSError as exc:
        print(f"stribola: cannot write output: {exc}", file=sys.stderr)
        return EX_CANTCREAT
    except StribolaError as exc:
        print(f"stribola: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
