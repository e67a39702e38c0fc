"""Walk through the first few iterates of T starting from the constant 1.

Run with ``python3 demos/01_canonical_iterates.py``.
"""

# %%
# Start from f = 1 and apply T four times on the graded grid x_i = (i/N)^2.
# The areas should come out as 1, 1/2, 1/3, 3/10, 2/7.
from fractions import Fraction

import numpy as np

from stribola import DEFAULT_TOL, area, constant_one, iterate_T, oracle_h, resample

tol = DEFAULT_TOL.with_(n_grid=4096)
keep = []
_, trace = iterate_T(constant_one(), 4, tol, keep=keep)

exact = [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(3, 10), Fraction(2, 7)]
for n, k, e in zip(trace.n, trace.kappa, exact):
    print(f"kappa_{n} = {k:.10f}   exact {str(e):>5}   error {k - float(e):+.2e}")

# %%
# The first iterates have closed forms, so compare pointwise.
for n in range(1, 4):
    h_exact, _ = oracle_h(n, 4096)
    got = resample(keep[n], h_exact.knots)
    print(f"h_{n}: max |numeric - closed form| = {np.abs(got.values - h_exact.values).max():.2e}")

# %%
# Areas keep falling, but by less each time; the ratio kappa_n / kappa_{n-1} rises.
k = np.array(trace.kappa)
print("ratios:", np.round(k[1:] / k[:-1], 6))
print("area of the last iterate:", area(keep[-1]))
