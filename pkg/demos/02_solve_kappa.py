"""Solve for the fixed point h and pin down kappa.

Run with ``python3 demos/02_solve_kappa.py``. Takes a few seconds.
"""

# %%
# A solve at N and a companion solve at N/2 give a Richardson estimate.
from stribola import DEFAULT_TOL, canonical_trace, kappa_bracket, solve
from stribola.solver import fixed_point_checks

sol = solve(tol=DEFAULT_TOL.with_(n_grid=16384))
print(f"raw kappa on the grid : {sol.kappa:.12f}")
print(f"extrapolated kappa    : {sol.kappa_extrapolated:.12f}")
print(f"iterations            : {sol.iterations}")

# %%
# The canonical areas give lower and upper bounds that tighten with n (up to grid error).
trace = canonical_trace(23, DEFAULT_TOL.with_(n_grid=16384))
for n in (1, 3, 5, 10, 23):
    lo, hi = kappa_bracket(trace, n)
    print(f"n={n:2d}: {lo:.10f} < kappa < {hi:.10f}")

# %%
# Edge identities that any fixed point must satisfy.
for check in fixed_point_checks(sol):
    print(check)
print(f"max |-kappa h' - h*| = {sol.residual_ide:.2e}")
