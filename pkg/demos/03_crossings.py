"""Count sign switches between rescaled copies of two decreasing functions.

Run with ``python3 demos/03_crossings.py``.
"""

# %%
# A function crosses its own rescaled copies at most once.
import numpy as np

from stribola import DEFAULT_TOL, crossing_number_lb, scan_scales, solve

tol = DEFAULT_TOL.with_(n_grid=2048)
h = solve(tol=tol, extrapolate=False).h
count, where = crossing_number_lb(h, h, tol)
print("max switches of h(a x) - b h(x) over the scale grid:", count, "at (a, b) =", where)

# %%
# Compare the fixed point with the line 1 - x.
from stribola import from_callable

line = from_callable(lambda x: 1 - x, 2048)
scan = scan_scales(line, h, tol)
counts, n = np.unique(scan.counts, return_counts=True)
print("switch count histogram for (1 - x, h):", dict(zip(counts.tolist(), n.tolist())))
