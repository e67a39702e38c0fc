"""Fixed, versioned test functions: solver seeds and the lemma fixture families.

Changing anything here changes the acceptance run; bump FIXTURE_VERSION.
"""

from __future__ import annotations

import numpy as np

from .monotone_fn import GridFunction, canonical_knots, from_callable

FIXTURE_VERSION = 1

SEED_NAMES = ("one", "linear", "step", "quartic", "sigmoid-like")


def seed(name: str, n_grid: int) -> GridFunction:
    """One of the five solver seeds in E, sampled on the canonical grid."""
    x = canonical_knots(n_grid)
    if name == "one":
        v = np.ones_like(x)
    elif name == "linear":
        v = 1.0 - x
    elif name == "step":
        v = np.where(x < 0.5, 1.0, 0.0)
    elif name == "quartic":
        v = (1.0 - x) ** 4
    elif name == "sigmoid-like":
        # concave on [0, 1/2], convex on [1/2, 1]
        v = 1.0 - 3.0 * x**2 + 2.0 * x**3
    else:
        raise KeyError(f"unknown seed {name!r}; choose from {', '.join(SEED_NAMES)}")
    return GridFunction(x, v)


def _power(p):
    return lambda x: (1.0 - x) ** p


def _truncated(beta, p):
    return lambda x: np.maximum(0.0, 1.0 - x / beta) ** p


def _exponential(lam):
    return lambda x: (np.exp(-lam * x) - np.exp(-lam)) / (1.0 - np.exp(-lam))


def _rational(c):
    return lambda x: (1.0 - x) / (1.0 + c * x)


def _polyline(xs, vs):
    return lambda x: np.interp(x, xs, vs)


# convex members of C: decreasing, f(0) = 1, f(1) = 0
CONVEX_C = {
    "power-1": _power(1.0),
    "power-1.25": _power(1.25),
    "power-1.5": _power(1.5),
    "power-2": _power(2.0),
    "power-2.5": _power(2.5),
    "power-3": _power(3.0),
    "power-4": _power(4.0),
    "power-6": _power(6.0),
    "truncated-0.4-1": _truncated(0.4, 1.0),
    "truncated-0.7-1": _truncated(0.7, 1.0),
    "truncated-0.5-2": _truncated(0.5, 2.0),
    "truncated-0.8-3": _truncated(0.8, 3.0),
    "exp-0.5": _exponential(0.5),
    "exp-2": _exponential(2.0),
    "exp-5": _exponential(5.0),
    "exp-10": _exponential(10.0),
    "rational-1": _rational(1.0),
    "rational-5": _rational(5.0),
    "polyline-a": _polyline([0.0, 0.2, 0.5, 1.0], [1.0, 0.5, 0.15, 0.0]),
    "polyline-b": _polyline([0.0, 0.1, 0.3, 0.6, 0.9, 1.0], [1.0, 0.7, 0.35, 0.1, 0.01, 0.0]),
    "h3-closed": lambda x: 1.0 - 3.0 * x + 2.0 * x**1.5,
    "mix-power": lambda x: 0.5 * (1.0 - x) ** 2 + 0.5 * (1.0 - x) ** 5,
}

# members of E that are not all convex or continuous-at-1: plateaus, f(1) > 0,
# concave stretches, a steep drop, a tiny area
GENERAL_E = {
    "one": lambda x: np.ones_like(x),
    "step": lambda x: np.where(x < 0.5, 1.0, 0.0),
    "sigmoid-like": lambda x: 1.0 - 3.0 * x**2 + 2.0 * x**3,
    "concave": lambda x: 1.0 - x**2,
    "half-linear": lambda x: 1.0 - 0.5 * x,
    "plateaus": _polyline([0.0, 0.3, 0.4, 0.7, 1.0], [1.0, 1.0, 0.4, 0.4, 0.1]),
    "spike": _polyline([0.0, 0.05, 0.06, 1.0], [1.0, 1.0, 0.0, 0.0]),
    "stairs": _polyline([0.0, 0.2, 0.25, 0.5, 0.55, 0.8, 0.85, 1.0],
                        [1.0, 1.0, 0.7, 0.7, 0.4, 0.4, 0.0, 0.0]),
    "power-3": _power(3.0),
    "sqrt-drop": lambda x: 1.0 - np.sqrt(x),
}


def convex_fixtures(n_grid: int) -> dict[str, GridFunction]:
    return {k: from_callable(f, n_grid) for k, f in CONVEX_C.items()}


def general_fixtures(n_grid: int) -> dict[str, GridFunction]:
    return {k: from_callable(f, n_grid) for k, f in GENERAL_E.items()}
