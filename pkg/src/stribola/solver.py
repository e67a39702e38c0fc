"""Fixed point of T: the unit stribola h, its area kappa, and checks on both."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from os import PathLike

import numpy as np

from .monotone_fn import (
    DEFAULT_TOL,
    DomainError,
    GridFunction,
    StribolaError,
    Tolerances,
    _require_E,
    area,
    canonical_knots,
    constant_one,
    d_inf,
    from_callable,
    pseudo_inverse,
    resample,
    stride,
    to_csv,
)
from .operators import IterationTrace, iterates, op_T, richardson

__all__ = [
    "NonConvergenceError",
    "StribolaSolution",
    "Check",
    "StandardStribola",
    "solve",
    "canonical_trace",
    "kappa_bracket",
    "oracle_h",
    "ORACLE_KAPPA",
    "residual_ide",
    "fixed_point_checks",
    "to_standard",
    "read_report",
]

ORACLE_KAPPA = (Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(3, 10), Fraction(2, 7))

STALL_WINDOW = 10
STALL_FACTOR = 0.999


class NonConvergenceError(StribolaError):
    """Raised by :func:`solve` when the iteration neither converges nor stalls below tol_fix.

    The partial result, trace included, is attached as ``solution``.
    """

    def __init__(self, message, solution):
        super().__init__(message)
        self.solution = solution


@dataclass
class StribolaSolution:
    h: GridFunction
    kappa: float
    bracket: tuple
    iterations: int
    residual_fix: float
    residual_ide: float
    grid: int
    kappa_extrapolated: float
    trace: IterationTrace = field(repr=False)
    converged: bool = True
    seed: str = "custom"

    def to_report(self, path: str | PathLike | None = None) -> str:
        """Key/value header followed by the CSV block of ``h``.

        ``kappa`` is the extrapolated estimate; ``kappa_grid`` is ``area h``.
        """
        head = [
            f"kappa={self.kappa_extrapolated:.17g}",
            f"kappa_grid={self.kappa:.17g}",
            f"bracket_lo={self.bracket[0]:.17g}",
            f"bracket_hi={self.bracket[1]:.17g}",
            f"iterations={self.iterations}",
            f"residual_fix={self.residual_fix:.17g}",
            f"residual_ide={self.residual_ide:.17g}",
            f"grid={self.grid}",
            f"converged={str(self.converged).lower()}",
            f"seed={self.seed}",
        ]
        text = "\n".join(head) + "\n" + to_csv(self.h)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def read_report(source) -> tuple[dict, GridFunction]:
    """Parse a report file (or its text) into ``(header dict, h)``."""
    from .monotone_fn import from_csv

    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source) as fh:
            text = fh.read()
    lines = text.splitlines()
    k = lines.index("x,value")
    header = dict(line.split("=", 1) for line in lines[:k] if line)
    return header, from_csv("\n".join(lines[k:]) + "\n")


def _is_constant_one(f: GridFunction) -> bool:
    return bool(np.all(f.values == 1.0))


def _run(f0: GridFunction, tol: Tolerances, n_grid: int, seed: str):
    # iterate until the step change drops below tol_fix, stalls, or max_iter is hit
    t = tol if n_grid == tol.n_grid else _with_grid(tol, n_grid)
    trace = IterationTrace(seed=seed, grid=n_grid)
    trace.append(f0, math.nan)
    f = f0
    converged = False
    for g in iterates(f0, t):
        step = d_inf(g, f)
        trace.append(g, step)
        f = g
        if step <= tol.tol_fix:
            converged = True
            break
        steps = trace.step_dinf
        if len(steps) > STALL_WINDOW + 1 and step >= STALL_FACTOR * steps[-1 - STALL_WINDOW]:
            break
        if len(trace) - 1 >= tol.max_iter:
            break
    return f, trace, converged


def _with_grid(tol: Tolerances, n_grid: int) -> Tolerances:
    # companion grids may fall below the public minimum, so bypass validation
    t = object.__new__(Tolerances)
    for name in Tolerances.__dataclass_fields__:
        object.__setattr__(t, name, getattr(tol, name))
    object.__setattr__(t, "n_grid", n_grid)
    return t


def canonical_trace(n: int, tol: Tolerances = DEFAULT_TOL) -> IterationTrace:
    """Trace of ``h_k = T^k 1`` for k = 0..n on the canonical grid."""
    trace = IterationTrace(seed="one", grid=tol.n_grid)
    f = constant_one()
    trace.append(f, math.nan)
    stream = iterates(f, tol)
    for _ in range(n):
        g = next(stream)
        trace.append(g, d_inf(g, f))
        f = g
    return trace


def kappa_bracket(trace: IterationTrace, n: int | None = None) -> tuple[float, float]:
    """``(kappa_n - 1 + kappa_n/kappa_{n-1}, kappa_n)`` from a trace of ``T^k 1``.

    ``n`` defaults to the last entry.
    """
    if len(trace) < 2:
        raise DomainError("bracket needs at least kappa_0 and kappa_1")
    if n is None:
        n = len(trace) - 1
    if not 1 <= n < len(trace):
        raise DomainError(f"n must lie in [1, {len(trace) - 1}]")
    k_prev, k = trace.kappa[n - 1], trace.kappa[n]
    return k - 1.0 + k / k_prev, k


def _last_strict_decrease(trace: IterationTrace) -> int:
    kap = trace.kappa
    n = len(kap) - 1
    while n > 1 and not kap[n] < kap[n - 1]:
        n -= 1
    return n


def residual_ide(h: GridFunction, kappa: float) -> float:
    """``max |-kappa h'(x) - h*(x)|`` over interior knots, centred differences for h'."""
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    x, v = h.knots, h.values
    slope = (v[2:] - v[:-2]) / (x[2:] - x[:-2])
    hs = pseudo_inverse(h)
    inv = np.interp(x[1:-1], hs.knots, hs.values)
    return float(np.max(np.abs(-kappa * slope - inv)))


def solve(
    f0: GridFunction | None = None,
    tol: Tolerances = DEFAULT_TOL,
    seed: str = "custom",
    extrapolate: bool = True,
) -> StribolaSolution:
    """Iterate T from ``f0`` (default: the constant 1) to its fixed point.

    The bracket always comes from the canonical sequence ``T^k 1`` on the
    same grid, taken at the last step where kappa_k still decreased.  With
    ``extrapolate`` the fixed point is also computed on half the grid and
    ``kappa_extrapolated`` is the Richardson combination of the two areas.
    Raises :class:`NonConvergenceError` if the step change never reaches
    ``tol.tol_fix``.
    """
    if f0 is None:
        f0, seed = constant_one(), "one"
    _require_E(f0, tol.eps_mono)
    h, trace, converged = _run(f0, tol, tol.n_grid, seed)

    if _is_constant_one(f0):
        ctrace = trace
    else:
        _, ctrace, _ = _run(constant_one(), tol, tol.n_grid, "one")
    bracket = kappa_bracket(ctrace, _last_strict_decrease(ctrace))

    kappa = area(h)
    t_next = op_T(h, tol)
    grid = canonical_knots(tol.n_grid)
    res_fix = d_inf(resample(t_next, grid), h)

    k_ex = kappa
    if extrapolate:
        h_half, _, _ = _run(f0, tol, tol.n_grid // 2, seed)
        k_ex = richardson(area(h_half), kappa)

    sol = StribolaSolution(
        h=h,
        kappa=kappa,
        bracket=bracket,
        iterations=len(trace) - 1,
        residual_fix=res_fix,
        residual_ide=residual_ide(h, kappa),
        grid=tol.n_grid,
        kappa_extrapolated=k_ex,
        trace=trace,
        converged=converged,
        seed=seed,
    )
    if not converged:
        raise NonConvergenceError(
            f"no convergence after {sol.iterations} iterations "
            f"(last step {trace.step_dinf[-1]:.3g} > {tol.tol_fix:.3g})",
            sol,
        )
    return sol


def _h3(x):
    return 1.0 - 3.0 * x + 2.0 * x**1.5


_CLOSED_FORMS = {
    0: lambda x: np.ones_like(x),
    1: lambda x: 1.0 - x,
    2: lambda x: (1.0 - x) ** 2,
    3: _h3,
}


def oracle_h(n: int, n_grid: int = DEFAULT_TOL.n_grid) -> tuple[GridFunction, Fraction]:
    """Closed-form canonical iterate ``h_n`` on the canonical grid with exact ``kappa_n``.

    ``h_4`` has no closed form here; it is ``op_T`` of the sampled ``h_3``.
    """
    if not 0 <= n <= 4:
        raise DomainError("closed forms exist for n = 0..4 only")
    if n == 4:
        h3, _ = oracle_h(3, n_grid)
        return resample(op_T(h3), canonical_knots(n_grid)), ORACLE_KAPPA[4]
    return from_callable(_CLOSED_FORMS[n], n_grid), ORACLE_KAPPA[n]


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    expected: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.measured - self.expected) <= self.tolerance

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"{self.name}: {status} (measured {self.measured:.10g}, "
            f"expected {self.expected:.10g} +/- {self.tolerance:g})"
        )


def fixed_point_checks(sol: StribolaSolution) -> list[Check]:
    """Edge identities every fixed point of T satisfies, measured on ``sol.h``."""
    h, kappa = sol.h, sol.kappa
    x, v = h.knots, h.values
    slope0 = (v[1] - v[0]) / (x[1] - x[0])
    s_left = (v[-2] - v[-3]) / (x[-2] - x[-3])
    s_right = (v[-1] - v[-2]) / (x[-1] - x[-2])
    curv1 = 2.0 * (s_right - s_left) / (x[-1] - x[-3])
    hs = pseudo_inverse(h)
    inv_slope1 = (hs.values[-1] - hs.values[-2]) / (hs.knots[-1] - hs.knots[-2])
    return [
        Check("area h = kappa", area(h), kappa, 1e-4),
        Check("stride h = kappa", stride(h), kappa, 1e-4),
        Check("h'(0) = -1/kappa", slope0, -1.0 / kappa, 1e-2),
        Check("h''(1) = 1", curv1, 1.0, 5e-2),
        Check("(h*)'(1) = -kappa", inv_slope1, -kappa, 1e-2),
    ]


@dataclass(frozen=True)
class StandardStribola:
    """Samples of ``x -> h(kappa x)/kappa`` on [0, 1/kappa]."""

    x: np.ndarray
    values: np.ndarray
    kappa: float

    def residual(self) -> float:
        """``max |-g'(x) - g*(x)|`` at interior samples, centred differences for g'."""
        x, v = self.x, self.values
        slope = (v[2:] - v[:-2]) / (x[2:] - x[:-2])
        # reflect the sampled graph; both axes span [0, 1/kappa]
        inv = np.interp(x[1:-1], v[::-1], x[::-1])
        return float(np.max(np.abs(-slope - inv)))


def to_standard(h: GridFunction, kappa: float, n: int | None = None) -> StandardStribola:
    """Rescale to the standard stribola on [0, 1/kappa].

    By default the samples sit at the images ``x_i / kappa`` of the knots of
    ``h``, so the residual is exactly ``residual_ide / kappa``; pass ``n`` for
    a uniform grid of ``n`` segments instead.
    """
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    if n is None:
        xs = h.knots
    else:
        xs = np.linspace(0.0, 1.0, n + 1)
    return StandardStribola(
        x=xs / kappa, values=np.interp(xs, h.knots, h.values) / kappa, kappa=kappa
    )
