"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: pass|FAIL`` line; the lines are also
collected into a section of the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from stribola import (
    DEFAULT_TOL,
    canonical_trace,
    constant_one,
    d_1,
    d_inf,
    iterate_T,
    kappa_bracket,
    op_T,
    resample,
    solve,
)
from stribola.cli import main
from stribola.fixtures import convex_fixtures
from stribola.solver import fixed_point_checks
from stribola.suites import random_K_pairs, run_suite

from .conftest import ACCEPTANCE_LINES


def report(number, title, ok, detail=""):
    line = f"criterion {number} ({title}): {'pass' if ok else 'FAIL'}" + (f" [{detail}]" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_closed_form_iterates(tmp_path, capsys):
    start = time.perf_counter()
    code = main(["iterate", "--n", "4", "--grid", "4096", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    kappas = np.array([float(row.split(",")[1]) for row in out.strip().splitlines()[1:]])
    want = np.array([1, 1 / 2, 1 / 3, 3 / 10, 2 / 7])
    err = np.abs(kappas - want).max() if kappas.size == want.size else math.inf
    with capsys.disabled():
        report(1, "closed-form iterates", code == 0 and err <= 1e-6 and elapsed < 1.0,
               f"max |kappa_n error| {err:.2e}, {elapsed:.2f} s")


def test_criterion_2_kappa_bracket(capsys):
    start = time.perf_counter()
    sol = solve(tol=DEFAULT_TOL.with_(n_grid=16384))
    trace = canonical_trace(23, DEFAULT_TOL.with_(n_grid=16384))
    lows = [kappa_bracket(trace, n)[0] for n in range(1, 24)]
    elapsed = time.perf_counter() - start
    k = sol.kappa_extrapolated
    nested = all(b >= a - 1e-9 for a, b in zip(lows, lows[1:]))
    in_window = 0.27887696 <= k <= 0.27887716
    with capsys.disabled():
        report(2, "kappa bracket", in_window and nested and elapsed < 30.0,
               f"kappa {k:.10f}, lower bounds nested: {nested}, {elapsed:.1f} s")


def test_criterion_3_fixed_point_residuals(capsys):
    tol = DEFAULT_TOL.with_(n_grid=8192)
    sol = solve(tol=tol, extrapolate=False)
    t = resample(op_T(sol.h), sol.h.knots)
    fix = d_inf(t, sol.h)
    checks = fixed_point_checks(sol)
    failed = [c.name for c in checks if not c.passed]
    ok = fix <= 1e-10 and sol.residual_ide <= 1e-3 and not failed
    with capsys.disabled():
        report(3, "fixed-point residuals", ok,
               f"d_inf(Th, h) {fix:.1e}, IDE {sol.residual_ide:.1e}, failed checks {failed or 'none'}")


def _suite_line(number, title, name, capsys, limit=None, min_convex=None):
    start = time.perf_counter()
    outcomes = run_suite(name)
    elapsed = time.perf_counter() - start
    bad = [o.name for o in outcomes if not o.passed]
    ok = not bad and (limit is None or elapsed < limit)
    detail = f"{len(outcomes) - len(bad)}/{len(outcomes)} checks, {elapsed:.1f} s"
    if min_convex is not None:
        n_convex = len(convex_fixtures(512))
        ok = ok and n_convex >= min_convex
        detail += f", {n_convex} convex fixtures"
    if bad:
        detail += f", failing: {bad}"
    with capsys.disabled():
        report(number, title, ok, detail)


def test_criterion_4_lemma_suite(capsys):
    _suite_line(4, "lemma suite", "lemmas", capsys, min_convex=20)


def test_criterion_5_crossing_suite(capsys):
    _suite_line(5, "crossing and domination suite", "crossing", capsys, limit=60.0)


def test_criterion_6_global_convergence(capsys):
    _suite_line(6, "global convergence", "convergence", capsys)


def test_criterion_7_metric_equivalence(capsys):
    pairs = random_K_pairs(200)
    excess_1 = excess_5 = -math.inf
    for f, g in pairs:
        a, b = d_1(f, g), d_inf(f, g)
        excess_1 = max(excess_1, a - b)
        excess_5 = max(excess_5, b - 5 * math.sqrt(a))
    ok = len(pairs) == 200 and excess_1 <= 0.0 and excess_5 <= 1e-9
    with capsys.disabled():
        report(7, "metric equivalence on K", ok,
               f"max(d_1 - d_inf) {excess_1:.1e}, max(d_inf - 5 sqrt d_1) {excess_5:.2f}")


def _kappa2(n):
    _, trace = iterate_T(constant_one(), 2, DEFAULT_TOL.with_(n_grid=n))
    return trace.kappa[2]


def test_criterion_8_order_of_accuracy(capsys):
    e_coarse = abs(_kappa2(2048) - 1 / 3)
    e_fine = abs(_kappa2(4096) - 1 / 3)
    ratio = e_coarse / e_fine
    with capsys.disabled():
        report(8, "second-order error model", ratio == pytest.approx(4.0, rel=0.10),
               f"error ratio {ratio:.4f}")
