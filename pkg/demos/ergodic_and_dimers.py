"""Birkhoff-average convergence rates, and dimer counts on grids.

Run:  python3 demos/ergodic_and_dimers.py
"""
from topinfer.ergodic import Doubling, l2_error_curve, make_map
from topinfer.matching import grid_matchings

grid = [100, 1000, 10_000, 100_000]
for name, sys, h in [("doubling, h(x)=x", Doubling(), "x"),
                     ("golden rotation, h(x)=sin 2 pi x", make_map("rotation"), "sin")]:
    c = l2_error_curve(sys, h, grid, 100, 7)
    errs = ", ".join(f"{e:.2e}" for e in c.l2_error)
    print(f"{name}: L2 errors {errs}; fitted exponent {c.fitted_exponent:.3f}")

print("\nperfect matchings of rows x cols grids (Kasteleyn determinant vs brute force)")
for r, c in [(2, 2), (2, 3), (3, 4), (4, 4), (4, 5)]:
    print(grid_matchings(r, c, True))
print(grid_matchings(8, 8, False))
