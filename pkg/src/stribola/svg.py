"""Plain-text SVG export of iterate overlays and of the stribola with its derivative.

Coordinates are written with fixed precision so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .monotone_fn import GridFunction, pseudo_inverse

MAX_POINTS = 1025
_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _thin(x: np.ndarray, v: np.ndarray, max_points: int = MAX_POINTS):
    if x.size <= max_points:
        return x, v
    idx = np.unique(np.linspace(0, x.size - 1, max_points).round().astype(int))
    return x[idx], v[idx]


def _points(xs, ys) -> str:
    return " ".join(f"{a:.6f},{b:.6f}" for a, b in zip(xs, ys))


def iterate_overlay(functions: list[GridFunction]) -> str:
    """One polyline per function on the unit viewbox (y axis pointing up)."""
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.05 -0.05 1.1 1.1" '
        'width="550" height="550">',
        '<g fill="none" stroke-width="0.004">',
        '<path d="M 0,1 L 1,1 M 0,0 L 0,1" stroke="#000000"/>',
    ]
    for n, f in enumerate(functions):
        x, v = _thin(f.knots, f.values)
        color = _COLORS[n % len(_COLORS)]
        lines.append(f'<polyline id="h{n}" stroke="{color}" points="{_points(x, 1.0 - v)}"/>')
    lines += ["</g>", "</svg>"]
    return "\n".join(lines) + "\n"


def figure1(h: GridFunction, kappa: float) -> str:
    """``h`` on [0, 1], ``h' = -h*/kappa`` below the axis, and a marker at height kappa.

    Drawing units equal data units; the viewbox is flipped so that y points up.
    """
    lo = -1.0 / kappa
    top, bottom = 1.15, lo - 0.15
    x, v = _thin(h.knots, h.values)
    hs = pseudo_inverse(h)
    dx, dv = _thin(hs.knots, -hs.values / kappa)
    height = top - bottom
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.3 {-top:.6f} 1.5 {height:.6f}" '
        f'width="{int(round(150 * 1.5))}" height="{int(round(150 * height))}">',
        '<g fill="none" stroke-width="0.01">',
        f'<path id="axes" d="M 0,0 L 1.1,0 M 0,{-top + 0.05:.6f} L 0,{-bottom - 0.05:.6f}" stroke="#000000"/>',
        f'<polyline id="h" stroke="#1f77b4" points="{_points(x, -v)}"/>',
        f'<polyline id="dh" stroke="#d62728" points="{_points(dx, -dv)}"/>',
        f'<line id="kappa" x1="-0.05" y1="{-kappa:.6f}" x2="1" y2="{-kappa:.6f}" '
        'stroke="#7f7f7f" stroke-dasharray="0.03,0.02"/>',
        "</g>",
        '<g font-size="0.08" font-family="serif">',
        f'<text x="-0.28" y="{-kappa + 0.03:.6f}">κ={kappa:.6f}</text>',
        f'<text x="-0.28" y="{-lo + 0.03:.6f}">-1/κ</text>',
        '<text x="-0.1" y="-0.97">1</text>',
        '<text x="0.98" y="0.1">1</text>',
        "</g>",
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
