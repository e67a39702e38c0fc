"""The operators I, D and T, the iteration driver, and Richardson extrapolation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterator

import numpy as np

from .monotone_fn import (
    DEFAULT_TOL,
    ClassError,
    DegenerateInputError,
    DomainError,
    GridFunction,
    Tolerances,
    _inverse_with_levels,
    _is_convex,
    _require_E,
    area,
    canonical_knots,
    d_inf,
    stride,
)

__all__ = [
    "IterationTrace",
    "op_I",
    "op_D",
    "op_T",
    "iterates",
    "iterate_T",
    "richardson",
    "zero_onset",
    "area_T",
]


def _right_integrals(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``c[i] = integral of the interpolant over [x[i], 1]``, exact."""
    seg = 0.5 * np.diff(x) * (v[1:] + v[:-1])
    c = np.zeros_like(x)
    c[:-1] = np.cumsum(seg[::-1])[::-1]
    return c


def op_I(g: GridFunction) -> GridFunction:
    """Normalized right integral ``x -> int_x^1 g / area g`` on the knots of ``g``."""
    c = _right_integrals(g.knots, g.values)
    total = c[0]
    if not total > 0:
        raise DegenerateInputError("op_I needs a function with positive area")
    vals = c / total
    vals[0] = 1.0
    vals[-1] = 0.0
    return GridFunction._trusted(g.knots.copy(), vals)


def op_D(f: GridFunction, tol: Tolerances = DEFAULT_TOL) -> GridFunction:
    """Slope profile ``f'/f'(0)`` from centred differences (one-sided at the ends)."""
    if not _is_convex(f, tol.eps_conv):
        raise ClassError("op_D needs a convex function")
    x, v = f.knots, f.values
    s = np.diff(v) / np.diff(x)
    if not s[0] < 0:
        raise DegenerateInputError("op_D needs a strictly negative slope at 0 (stride > 0)")
    slopes = np.empty_like(x)
    slopes[0] = s[0]
    slopes[-1] = s[-1]
    if x.size > 2:
        slopes[1:-1] = (v[2:] - v[:-2]) / (x[2:] - x[:-2])
    return GridFunction._trusted(x.copy(), np.clip(slopes / s[0], 0.0, 1.0))


def op_T(f: GridFunction, tol: Tolerances = DEFAULT_TOL) -> GridFunction:
    """``T f = I(f*)``: rotate the graph, normalize by area, integrate from the right.

    The result lives on the ordinates of ``f`` (deduplicated, plus 0 and 1);
    node values are exact right integrals of the stored pseudo-inverse.
    """
    a = area(f)
    if not a > 0:
        raise DegenerateInputError("op_T needs a function with positive area")
    _require_E(f, tol.eps_mono)
    y, xs, keep = _inverse_with_levels(f)
    c = _right_integrals(y, xs)
    vals = c / c[0]
    vals[0] = 1.0
    vals[-1] = 0.0
    return GridFunction._trusted(y[keep], vals[keep])


def zero_onset(g: GridFunction, eps: float = DEFAULT_TOL.eps_mono) -> float:
    """``inf g^{-1}{0}``: first knot with value <= eps, refined inside its segment."""
    x, v = g.knots, g.values
    j = int(np.argmax(v <= eps)) if np.any(v <= eps) else x.size - 1
    if j == 0 or v[j - 1] == v[j]:
        return float(x[j])
    r = x[j - 1] + (x[j] - x[j - 1]) * v[j - 1] / (v[j - 1] - v[j])
    return float(min(max(r, x[j - 1]), x[j]))


def area_T(g: GridFunction) -> float:
    """Exact ``area(T g)`` for the stored model: ``int g**2 / (2 area g)``.

    ``area(op_T(g))`` is the area of the interpolated result and exceeds this
    by O(N**-2) for convex output.
    """
    x, v = g.knots, g.values
    a = area(g)
    if not a > 0:
        raise DegenerateInputError("area_T needs a function with positive area")
    sq = np.sum(np.diff(x) * (v[:-1] ** 2 + v[:-1] * v[1:] + v[1:] ** 2)) / 3.0
    return float(sq / (2.0 * a))


@dataclass
class IterationTrace:
    """Per-step record of an iteration ``f_k = T^k f_0``.

    ``step_dinf[0]`` is NaN: there is no step before the seed.
    """

    seed: str = "custom"
    grid: int = 0
    n: list = field(default_factory=list)
    kappa: list = field(default_factory=list)
    stride: list = field(default_factory=list)
    step_dinf: list = field(default_factory=list)

    def append(self, f: GridFunction, step: float):
        self.n.append(len(self.n))
        self.kappa.append(area(f))
        self.stride.append(stride(f))
        self.step_dinf.append(step)

    def __len__(self):
        return len(self.n)

    def to_csv(self, path: str | PathLike | None = None) -> str:
        lines = ["n,kappa,stride,step_dinf"]
        for n, k, s, d in zip(self.n, self.kappa, self.stride, self.step_dinf):
            lines.append(f"{n},{k:.17g},{s:.17g},{d:.17g}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def iterates(f0: GridFunction, tol: Tolerances = DEFAULT_TOL) -> Iterator[GridFunction]:
    """Endless stream ``T f0, T^2 f0, ...``, each resampled to the canonical grid."""
    grid = canonical_knots(tol.n_grid)
    f = f0
    while True:
        t = op_T(f, tol)
        f = GridFunction._trusted(grid, np.interp(grid, t.knots, t.values))
        if not area(f) > 0:
            raise DegenerateInputError("iterate lost positive area (internal consistency failure)")
        yield f


def iterate_T(
    f0: GridFunction, n: int, tol: Tolerances = DEFAULT_TOL, seed: str = "custom",
    keep: list | None = None,
) -> tuple[GridFunction, IterationTrace]:
    """Apply T ``n`` times with resampling; pass a list as ``keep`` to collect every iterate."""
    if n < 0 or n > tol.max_iter:
        raise DomainError(f"iteration count must lie in [0, {tol.max_iter}]")
    _require_E(f0, tol.eps_mono)
    trace = IterationTrace(seed=seed, grid=tol.n_grid)
    trace.append(f0, math.nan)
    if keep is not None:
        keep.append(f0)
    f = f0
    stream = iterates(f0, tol)
    for _ in range(n):
        g = next(stream)
        trace.append(g, d_inf(g, f))
        if keep is not None:
            keep.append(g)
        f = g
    return f, trace


def richardson(value_n: float, value_2n: float) -> float:
    """Cancel the O(N**-2) error term from values computed at N and 2N."""
    if not (math.isfinite(value_n) and math.isfinite(value_2n)):
        raise DomainError("richardson needs finite values")
    return (4.0 * value_2n - value_n) / 3.0
