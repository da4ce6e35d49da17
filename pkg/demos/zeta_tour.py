"""Walk through the zeta invariants of a few small graphs.

Run:  python3 demos/zeta_tour.py
"""
from topinfer.graph import complete_graph, cycle_graph, petersen_graph
from topinfer.zeta import (
    circuit_rank,
    enumerate_prime_loops,
    euler_product_truncation,
    kappa_from_zeta,
    topological_summary,
    zeta_reciprocal,
)

M = 10

for name, g in [("C5", cycle_graph(5)), ("K4", complete_graph(4)), ("Petersen", petersen_graph())]:
    zp = zeta_reciprocal(g)
    print(f"== {name}: |V|={g.n_vertices} |E|={g.n_edges} circuit rank {circuit_rank(g)}")
    print("  1/zeta coefficients:", list(zp.coeffs))

    # the polynomial and the brute-force prime census must agree coefficient by coefficient
    primes = enumerate_prime_loops(g, M)
    euler = euler_product_truncation(primes, M)
    print("  prime loops by length:", {m: c for m, c in enumerate(primes) if c})
    print("  matches the Euler product through u^%d:" % M, euler == (list(zp.coeffs) + [0] * M)[: M + 1])

    s = topological_summary(g, M)
    print("  closed non-backtracking loops N_m:", list(s.loop_counts))
    print(f"  radius of convergence {s.radius:.10f}, period {s.delta}")
    if circuit_rank(g) >= 2:
        print(f"  spanning trees: {s.spanning_trees} (from the zeta derivative: "
              f"{kappa_from_zeta(zp, circuit_rank(g))})")
