"""Decreasing functions on [0, 1] stored as piecewise-linear knot/value data.

Everything the solver touches (seeds, iterates, pseudo-inverses, the limit)
is a :class:`GridFunction`.  The piecewise-linear model is closed under
graph reflection, so the pseudo-inverse of a stored function is exact; the
only discretization error in the pipeline enters when a result is resampled
onto a grid.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from os import PathLike
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "StribolaError",
    "DomainError",
    "ClassError",
    "DegenerateInputError",
    "Tolerances",
    "DEFAULT_TOL",
    "log_scales",
    "scale_pairs",
    "GridFunction",
    "ClassReport",
    "uniform_knots",
    "canonical_knots",
    "from_callable",
    "constant_one",
    "evaluate",
    "pseudo_inverse",
    "area",
    "stride",
    "edge_slopes",
    "d_inf",
    "d_1",
    "classify",
    "resample",
    "merged_knots",
    "integral",
    "to_csv",
    "from_csv",
]


class StribolaError(Exception):
    """Base class for errors raised by this package."""


class DomainError(StribolaError, ValueError):
    """An argument lies outside the domain of an operation."""


class ClassError(StribolaError, ValueError):
    """A function fails the class membership an operation requires."""


class DegenerateInputError(StribolaError, ValueError):
    """Zero area or zero stride where a positive value is required."""


def log_scales(n_side: int = 20, hi: float = 4.0) -> np.ndarray:
    """``2*n_side + 1`` log-uniform scales on [1/hi, hi], closed under inversion."""
    up = hi ** (np.arange(1, n_side + 1) / n_side)
    return np.concatenate([1.0 / up[::-1], [1.0], up])


def scale_pairs(scales) -> tuple:
    return tuple((float(a), float(b)) for a in scales for b in scales)


def _default_scale_grid():
    return scale_pairs(log_scales())


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds shared by every operation.

    ``scale_grid`` holds the (a, b) pairs scanned when bounding crossing
    numbers; the default is a log-uniform 41 x 41 grid over [1/4, 4]^2.
    """

    eps_sign: float = 1e-7
    eps_mono: float = 1e-9
    eps_conv: float = 1e-9
    tol_fix: float = 1e-12
    n_grid: int = 4096
    scale_grid: tuple = field(default_factory=_default_scale_grid, repr=False)
    max_iter: int = 200

    def __post_init__(self):
        for name in ("eps_sign", "eps_mono", "eps_conv", "tol_fix"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.n_grid < 8:
            raise DomainError("n_grid must be at least 8")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if len(self.scale_grid) == 0:
            raise DomainError("scale_grid must not be empty")
        for a, b in self.scale_grid:
            if not (a > 0 and b > 0 and np.isfinite(a) and np.isfinite(b)):
                raise DomainError("scale pairs must be finite and positive")

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT_TOL = Tolerances()


class GridFunction:
    """A non-increasing function [0, 1] -> [0, 1], linear between knots.

    Parameters
    ----------
    knots : array_like
        Strictly ascending abscissae starting at exactly 0 and ending at
        exactly 1.
    values : array_like
        Ordinates at the knots.  Monotonicity violations up to ``eps_mono``
        are rounded away with a running minimum, and values within
        ``eps_mono`` of [0, 1] are clamped; anything worse raises.
    """

    __slots__ = ("knots", "values")

    def __init__(self, knots, values, eps_mono: float = DEFAULT_TOL.eps_mono):
        x = np.array(knots, dtype=float)
        v = np.array(values, dtype=float)
        if x.ndim != 1 or v.shape != x.shape:
            raise DomainError("knots and values must be 1-d arrays of equal length")
        if x.size < 2:
            raise DomainError("need at least two knots")
        if x[0] != 0.0 or x[-1] != 1.0:
            raise DomainError("knots must start at 0 and end at 1")
        if not np.all(np.diff(x) > 0):
            raise DomainError("knots must be strictly ascending")
        if not np.all(np.isfinite(v)):
            raise DomainError("values must be finite")
        if v.min() < -eps_mono or v.max() > 1 + eps_mono:
            raise DomainError("values must lie in [0, 1]")
        if np.any(np.diff(v) > eps_mono):
            raise DomainError("values must be non-increasing")
        v = np.clip(np.minimum.accumulate(v), 0.0, 1.0)
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "knots", x)
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @classmethod
    def _trusted(cls, x: np.ndarray, v: np.ndarray) -> "GridFunction":
        # internal fast path for arrays already known to satisfy the invariants
        obj = object.__new__(cls)
        x = np.asarray(x, dtype=float)
        v = np.clip(np.minimum.accumulate(np.asarray(v, dtype=float)), 0.0, 1.0)
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(obj, "knots", x)
        object.__setattr__(obj, "values", v)
        return obj

    def __call__(self, x):
        return evaluate(self, x)

    def __len__(self):
        return self.knots.size

    @property
    def n_segments(self) -> int:
        return self.knots.size - 1

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return np.array_equal(self.knots, other.knots) and np.array_equal(
            self.values, other.values
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"GridFunction(n_knots={self.knots.size}, "
            f"f(0)={self.values[0]:.6g}, f(1)={self.values[-1]:.6g})"
        )


@dataclass(frozen=True)
class ClassReport:
    in_E: bool
    in_C: bool
    in_D: bool
    is_convex: bool
    in_K: bool
    area: float
    stride: float
    slope0: float
    slope1: float


def uniform_knots(n: int) -> np.ndarray:
    """``n + 1`` equally spaced knots on [0, 1]."""
    if n < 1:
        raise DomainError("need at least one segment")
    x = np.linspace(0.0, 1.0, n + 1)
    x[-1] = 1.0
    return x


def canonical_knots(n: int) -> np.ndarray:
    """The solver grid: ``n + 1`` knots ``(i/n)**2``, graded towards 0.

    Iterates of T behave like ``1 - x/s + c x**1.5`` at the origin; the
    quadratic grading keeps the first-knot error in stride and slope
    estimates at O(1/n) instead of O(n**-0.5).
    """
    t = uniform_knots(n)
    return t * t


def from_callable(func: Callable, knots, eps_mono: float = DEFAULT_TOL.eps_mono):
    """Sample ``func`` at ``knots`` (an array or a segment count for the canonical grid)."""
    x = canonical_knots(knots) if np.isscalar(knots) else np.asarray(knots, float)
    return GridFunction(x, np.asarray(func(x), dtype=float), eps_mono=eps_mono)


def constant_one() -> GridFunction:
    return GridFunction._trusted(np.array([0.0, 1.0]), np.array([1.0, 1.0]))


def evaluate(f: GridFunction, x):
    """Piecewise-linear interpolation of ``f``; exact at knots."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa >= 0.0)) or np.any(~(xa <= 1.0)):
        raise DomainError("evaluation point outside [0, 1]")
    out = np.interp(xa, f.knots, f.values)
    return float(out) if out.ndim == 0 else out


def _require_E(f: GridFunction, eps: float, what: str = "f"):
    if abs(f.values[0] - 1.0) > eps:
        raise ClassError(f"{what} must satisfy f(0) = 1")
    if area(f) <= 0:
        raise ClassError(f"{what} must have positive area")


def _inverse_with_levels(f: GridFunction):
    # knots/values of f* plus a mask marking knots that are ordinates of f;
    # a plateau of f becomes a near-vertical segment a few ulps wide
    x, v = f.knots, f.values
    levels = np.unique(v)
    neg = -v
    right = x[np.searchsorted(neg, -levels, side="right") - 1]
    left = x[np.searchsorted(neg, -levels, side="left")]
    top = np.append(levels[1:], 1.0)
    y_up = np.where(levels > 0, levels * 2.0**-50, 1e-300) + levels
    jump = (left < right) & (levels < 1.0) & (y_up < top)
    counts = 1 + jump
    pos = np.cumsum(counts) - counts
    m = int(counts.sum())
    ys, xs, keep = np.empty(m), np.empty(m), np.ones(m, dtype=bool)
    ys[pos], xs[pos] = levels, right
    jp = pos[jump] + 1
    ys[jp], xs[jp], keep[jp] = y_up[jump], left[jump], False
    if levels[0] > 0:
        ys, xs, keep = np.r_[0.0, ys], np.r_[1.0, xs], np.r_[True, keep]
    if ys[-1] != 1.0:
        # f(0) was clamped from just below 1
        ys, xs, keep = np.r_[ys, 1.0], np.r_[xs, xs[-1]], np.r_[keep, True]
    return ys, xs, keep


def pseudo_inverse(f: GridFunction, eps_mono: float = DEFAULT_TOL.eps_mono):
    """The pseudo-inverse ``y -> sup{x : f(x) >= y}`` as a GridFunction.

    For strictly decreasing ``f`` this is the exact graph reflection.  A
    plateau of ``f`` at level ``y`` becomes a jump of the result: the value
    at ``y`` is the right end of the plateau and the left end is reached one
    float step above ``y``.  Below ``f(1)`` the result is 1.
    """
    _require_E(f, eps_mono)
    y, xs, _ = _inverse_with_levels(f)
    return GridFunction._trusted(y, xs)


def area(f: GridFunction) -> float:
    """Exact integral of the piecewise-linear interpolant."""
    x, v = f.knots, f.values
    return float(np.sum(np.diff(x) * (v[1:] + v[:-1])) * 0.5)


def stride(f: GridFunction) -> float:
    """``sup{s >= 0 : s - x <= s f(x)}`` for the stored model, in [0, 1].

    On each segment ``x / (1 - f(x))`` is monotone, so the minimum over
    knots with ``f < 1`` is exact.  Equals ``-1/f'(0+)`` for convex ``f``.
    """
    x, v = f.knots, f.values
    mask = v < 1.0
    if not np.any(mask):
        return 1.0
    r = x[mask] / (1.0 - v[mask])
    return float(min(1.0, r.min()))


def edge_slopes(f: GridFunction) -> tuple[float, float]:
    """Supporting slopes at the two edges: ``(-1/stride f, -min v/(1-x))``."""
    s = stride(f)
    slope0 = -np.inf if s == 0 else -1.0 / s
    x, v = f.knots, f.values
    mask = x < 1.0
    slope1 = -float(np.min(v[mask] / (1.0 - x[mask])))
    return float(slope0), slope1


def integral(f: GridFunction, lo: float, hi: float) -> float:
    """Exact integral of the interpolant over ``[lo, hi]`` within [0, 1]."""
    if not 0.0 <= lo <= hi <= 1.0:
        raise DomainError("need 0 <= lo <= hi <= 1")
    x = f.knots
    inner = x[(x > lo) & (x < hi)]
    u = np.concatenate([[lo], inner, [hi]])
    v = np.interp(u, x, f.values)
    return float(np.sum(np.diff(u) * (v[1:] + v[:-1])) * 0.5)


def merged_knots(*fs: GridFunction) -> np.ndarray:
    return np.unique(np.concatenate([f.knots for f in fs]))


def d_inf(f: GridFunction, g: GridFunction) -> float:
    """Sup distance; exact because ``f - g`` is linear between merged knots."""
    u = merged_knots(f, g)
    return float(np.max(np.abs(np.interp(u, f.knots, f.values) - np.interp(u, g.knots, g.values))))


def _abs_integral(u: np.ndarray, d: np.ndarray) -> float:
    # exact integral of |piecewise-linear d| with sign changes split
    w = np.diff(u)
    d0, d1 = d[:-1], d[1:]
    a0, a1 = np.abs(d0), np.abs(d1)
    same = d0 * d1 >= 0
    seg = np.empty_like(w)
    seg[same] = 0.5 * (a0[same] + a1[same]) * w[same]
    cross = ~same
    seg[cross] = 0.5 * (d0[cross] ** 2 + d1[cross] ** 2) / (a0[cross] + a1[cross]) * w[cross]
    return float(seg.sum())


def d_1(f: GridFunction, g: GridFunction) -> float:
    """``area |f - g|``, exact for the piecewise-linear model."""
    u = merged_knots(f, g)
    d = np.interp(u, f.knots, f.values) - np.interp(u, g.knots, g.values)
    return _abs_integral(u, d)


def _is_convex(f: GridFunction, eps_conv: float) -> bool:
    x, v = f.knots, f.values
    if x.size < 3:
        return True
    # height of each interior value below the chord of its neighbours; on a uniform
    # grid this is half the second difference, and it never divides by a spacing
    w = (x[1:-1] - x[:-2]) / (x[2:] - x[:-2])
    chord = v[:-2] + w * (v[2:] - v[:-2])
    return bool(np.all(chord - v[1:-1] >= -eps_conv))


def classify(f: GridFunction, tol: Tolerances = DEFAULT_TOL) -> ClassReport:
    a = area(f)
    s = stride(f)
    s0, s1 = edge_slopes(f)
    v = f.values
    in_E = abs(v[0] - 1.0) <= tol.eps_mono and a > 0
    in_C = in_E and v[-1] <= tol.eps_mono
    in_D = in_C and bool(np.all(np.diff(v) < 0))
    convex = _is_convex(f, tol.eps_conv)
    floor = 0.2 - tol.eps_mono
    in_K = convex and in_C and a >= floor and s >= floor
    return ClassReport(
        in_E=bool(in_E),
        in_C=bool(in_C),
        in_D=bool(in_D),
        is_convex=convex,
        in_K=bool(in_K),
        area=a,
        stride=s,
        slope0=s0,
        slope1=s1,
    )


def resample(f: GridFunction, knots) -> GridFunction:
    """Values of ``f`` at new knots (ascending, from exactly 0 to exactly 1)."""
    x = np.asarray(knots, dtype=float)
    if x.ndim != 1 or x.size < 2 or x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
        raise DomainError("knots must ascend strictly from 0 to 1")
    return GridFunction._trusted(x.copy(), np.interp(x, f.knots, f.values))


def to_csv(f: GridFunction, path: str | PathLike | None = None) -> str:
    """Write ``x,value`` rows at round-trip precision; returns the text."""
    buf = io.StringIO()
    buf.write("x,value\n")
    for xi, vi in zip(f.knots, f.values):
        buf.write(f"{xi:.17g},{vi:.17g}\n")
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _rows_to_function(rows: Iterable[Sequence[str]]) -> GridFunction:
    rows = list(rows)
    if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
        raise DomainError("CSV must start with header 'x,value'")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("CSV rows must have two columns")
    return GridFunction(data[:, 0], data[:, 1])


def from_csv(source) -> GridFunction:
    """Read a GridFunction from a path or from CSV text containing a newline."""
    if isinstance(source, str) and "\n" in source:
        return _rows_to_function(csv.reader(io.StringIO(source)))
    with open(source, newline="") as fh:
        return _rows_to_function(csv.reader(fh))
