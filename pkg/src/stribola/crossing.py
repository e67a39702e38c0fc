"""Sign switches of ``f(a x) - b g(x)``, crossing-number lower bounds, domination.

The crossing number is a supremum over all scale pairs (a, b), which no
finite computation attains.  What is computed here is the maximum over a
configurable grid of pairs: a certified *lower* bound.  Domination verdicts
are accordingly three-valued; a refutation comes with a witness and is
sound, "consistent" is evidence only.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .monotone_fn import (
    DEFAULT_TOL,
    ClassError,
    DomainError,
    GridFunction,
    Tolerances,
    classify,
    merged_knots,
)

__all__ = [
    "ScaledDifference",
    "SwitchReport",
    "Verdict",
    "DominationVerdict",
    "ScaleScan",
    "scaled_difference",
    "sign_switches",
    "count_switches",
    "scan_scales",
    "crossing_number_lb",
    "dominates",
]


@dataclass(frozen=True)
class ScaledDifference:
    """Samples of ``f(a x) - b g(x)`` on ``[0, min(1, 1/a)]``.

    The sample set contains every knot of both terms, so the samples pin
    down the piecewise-linear difference exactly.
    """

    f: GridFunction
    g: GridFunction
    a: float
    b: float
    m: float
    x: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class SwitchReport:
    count: int
    intervals: tuple
    eps_sign: float


class Verdict(str, enum.Enum):
    CONSISTENT = "consistent"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DominationVerdict:
    verdict: Verdict
    max_switches: int
    witness: tuple | None = None
    witness_switches: int | None = None
    order_violation: float = 0.0

    def __str__(self):
        s = f"{self.verdict.value} (max switches {self.max_switches})"
        if self.witness is not None:
            s += f", witness a={self.witness[0]:.6g} b={self.witness[1]:.6g}"
        return s


def _samples(f: GridFunction, a: float, g: GridFunction):
    m = min(1.0, 1.0 / a)
    xf = f.knots / a
    x = np.unique(np.concatenate([xf[xf <= m], g.knots[g.knots <= m], [m]]))
    fa = np.interp(np.minimum(a * x, 1.0), f.knots, f.values)
    gx = np.interp(x, g.knots, g.values)
    return m, x, fa, gx


def scaled_difference(f: GridFunction, a: float, g: GridFunction, b: float) -> ScaledDifference:
    if not (a > 0 and b > 0 and np.isfinite(a) and np.isfinite(b)):
        raise DomainError("scales must be finite and positive")
    m, x, fa, gx = _samples(f, a, g)
    return ScaledDifference(f=f, g=g, a=float(a), b=float(b), m=m, x=x, values=fa - b * gx)


def _signs(values: np.ndarray, eps: float) -> np.ndarray:
    s = np.sign(values).astype(np.int8)
    s[np.abs(values) <= eps] = 0
    return s


def count_switches(values: np.ndarray, eps: float) -> np.ndarray:
    """Switch counts along the last axis; samples within ``eps`` of 0 are sign-neutral."""
    s = _signs(np.atleast_2d(values), eps)
    idx = np.arange(s.shape[-1])
    last = np.where(s != 0, idx, 0)
    np.maximum.accumulate(last, axis=-1, out=last)
    filled = np.take_along_axis(s, last, axis=-1)
    # a switch is a change between consecutive nonzero signs
    change = (filled[..., 1:] * filled[..., :-1]) < 0
    out = change.sum(axis=-1)
    return out if np.ndim(values) > 1 else out[0]


def sign_switches(delta: ScaledDifference, eps_sign: float = DEFAULT_TOL.eps_sign) -> SwitchReport:
    """Count and locate the sign switches of a sampled difference.

    A zero-run (samples within ``eps_sign``) is a switch exactly when the
    nearest off-band samples on both sides have opposite signs; a strict
    crossing between neighbours is located by linear interpolation.  Runs
    touching either end of the domain are never switches.
    """
    x, d = delta.x, delta.values
    s = _signs(d, eps_sign)
    nz = np.flatnonzero(s)
    intervals = []
    for i, j in zip(nz[:-1], nz[1:]):
        if s[i] == s[j]:
            continue
        if j == i + 1:
            r = x[i] + (x[j] - x[i]) * d[i] / (d[i] - d[j])
            intervals.append((float(r), float(r)))
        else:
            intervals.append((float(x[i + 1]), float(x[j - 1])))
    return SwitchReport(count=len(intervals), intervals=tuple(intervals), eps_sign=eps_sign)


@dataclass(frozen=True)
class ScaleScan:
    """Switch counts for every scanned (a, b) pair."""

    pairs: tuple
    counts: np.ndarray

    @property
    def max_count(self) -> int:
        return int(self.counts.max())

    @property
    def argmax(self) -> tuple:
        return self.pairs[int(np.argmax(self.counts))]

    def to_text(self) -> str:
        """Audit format: one ``a,b,switches`` line per pair."""
        lines = [f"{a:.17g},{b:.17g},{int(c)}" for (a, b), c in zip(self.pairs, self.counts)]
        return "\n".join(lines) + "\n"


def _threads() -> int:
    try:
        return max(0, int(os.environ.get("STRIBOLA_THREADS", "0")))
    except ValueError:
        return 0


def scan_scales(f: GridFunction, g: GridFunction, tol: Tolerances = DEFAULT_TOL) -> ScaleScan:
    """Switch count of ``f(a x) - b g(x)`` for every pair in ``tol.scale_grid``."""
    pairs = tuple(tol.scale_grid)
    by_a: dict[float, list[int]] = {}
    for k, (a, _) in enumerate(pairs):
        by_a.setdefault(a, []).append(k)
    counts = np.zeros(len(pairs), dtype=int)

    def work(a):
        _, _, fa, gx = _samples(f, a, g)
        ks = by_a[a]
        bs = np.array([pairs[k][1] for k in ks])
        counts[ks] = count_switches(fa[None, :] - bs[:, None] * gx[None, :], tol.eps_sign)

    n = _threads()
    if n > 0:
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(work, by_a))
    else:
        for a in by_a:
            work(a)
    return ScaleScan(pairs=pairs, counts=counts)


def _require_D(f: GridFunction, tol: Tolerances, name: str):
    if not classify(f, tol).in_D:
        raise ClassError(f"{name} must be continuous and strictly decreasing with f(0)=1, f(1)=0")


def crossing_number_lb(f: GridFunction, g: GridFunction, tol: Tolerances = DEFAULT_TOL):
    """Lower bound for the crossing number of ``f`` with ``g``: ``(count, (a, b))``."""
    _require_D(f, tol, "f")
    _require_D(g, tol, "g")
    scan = scan_scales(f, g, tol)
    return scan.max_count, scan.argmax


def dominates(f: GridFunction, g: GridFunction, tol: Tolerances = DEFAULT_TOL) -> DominationVerdict:
    """Evidence for ``f`` dominating ``g``: ``g <= f`` and crossing number exactly 2."""
    _require_D(f, tol, "f")
    _require_D(g, tol, "g")
    u = merged_knots(f, g)
    excess = np.interp(u, g.knots, g.values) - np.interp(u, f.knots, f.values)
    violation = float(max(excess.max(), 0.0))
    scan = scan_scales(f, g, tol)
    top = scan.max_count
    if violation > tol.eps_sign:
        c = int(count_switches(excess * -1.0, tol.eps_sign))
        return DominationVerdict(Verdict.REFUTED, top, (1.0, 1.0), c, violation)
    if top >= 3:
        return DominationVerdict(Verdict.REFUTED, top, scan.argmax, top, violation)
    if top == 2:
        return DominationVerdict(Verdict.CONSISTENT, top, None, None, violation)
    return DominationVerdict(Verdict.INCONCLUSIVE, top, None, None, violation)
