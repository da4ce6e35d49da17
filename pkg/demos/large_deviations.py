"""Rate functions from sampled SCGFs, and Girsanov reweighting of a diffusion.

Run:  python3 demos/large_deviations.py
"""
import numpy as np

from topinfer.largedev import (
    Bernoulli,
    DiffusionSystem,
    cramer_rate_analytic,
    direct_moment,
    empirical_scgf,
    ldp_decay_check,
    legendre_transform,
    ou_second_moment,
    reweighted_moment,
)

coin = Bernoulli(0.5)
t = np.round(np.arange(-3, 3.0001, 0.01), 10)
scgf = empirical_scgf(coin, 100, t, 10_000, 1)
x = np.linspace(0.2, 0.8, 7)
rate = legendre_transform(scgf, x)
print("   x    estimated rate   exact")
for xi, q in zip(x, rate.q_hat):
    print(f"{xi:5.2f}   {q:.4f}           {cramer_rate_analytic(coin, xi):.4f}")

print("\nfinite-n decay of P(mean >= 0.7); the limit rate is approached slowly")
for row in ldp_decay_check(coin, 0.7, [25, 50, 100], 200_000, 2):
    print(f"n={row['n']:4d}  empirical {row['rate_hat']:.4f}  exact tail {row['rate_exact']:.4f}  "
          f"limit {row['rate_limit']:.4f}")

print("\nOU process dX = -X dt + dW from X0 = 1, E[X(1)^2]")
sys = DiffusionSystem(1, None, lambda e: -e, 1e-2, 1.0, 1.0)
obs = lambda e: e[:, 0] ** 2
d = direct_moment(sys, obs, 20_000, 3)
w = reweighted_moment(sys, obs, 20_000, 4)
print(f"direct {d.mean:.4f}  reweighted {w.mean:.4f} (ESS {w.ess_fraction:.2f})  "
      f"analytic {ou_second_moment(1.0, 1.0):.4f}")
