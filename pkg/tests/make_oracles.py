"""Regenerate tests/data/oracles.json.

Every value here comes from a route independent of the production
polynomial pipeline: symbolic determinants (sympy), the brute-force prime
loop census, and divisor sums over that census.  Run once; the JSON is then
frozen and the tests compare against it.
"""
from __future__ import annotations

import json
from pathlib import Path

import sympy

from corpus import corpus
from topinfer.zeta import enumerate_prime_loops

M = 12


def symbolic_bass(g) -> list[int]:
    u = sympy.symbols("u")
    n = g.n_vertices
    a = sympy.zeros(n, n)
    for x, y, _ in g.edges:
        a[x, y] += 1
        a[y, x] += 1
    d = sympy.diag(*[sum(a.row(i)) for i in range(n)])
    det = (sympy.eye(n) - u * a + u ** 2 * (d - sympy.eye(n))).det(method="berkowitz")
    poly = sympy.Poly(sympy.expand((1 - u ** 2) ** (g.n_edges - n) * det), u)
    return [int(c) for c in reversed(poly.all_coeffs())]


def symbolic_trees(g) -> int:
    n = g.n_vertices
    lap = sympy.zeros(n, n)
    for x, y, _ in g.edges:
        lap[x, y] -= 1
        lap[y, x] -= 1
        lap[x, x] += 1
        lap[y, y] += 1
    return int(lap[1:, 1:].det())


def main() -> None:
    out = {}
    for name, g in corpus().items():
        pi = enumerate_prime_loops(g, M)
        n_m = [sum(d * pi[d] for d in range(1, m + 1) if m % d == 0) for m in range(1, M + 1)]
        out[name] = {
            "n": g.n_vertices,
            "edges": [list(e[:2]) for e in g.edges],
            "zeta_reciprocal": symbolic_bass(g),
            "prime_counts": pi,
            "loop_counts": n_m,
            "spanning_trees": symbolic_trees(g),
        }
    path = Path(__file__).parent / "data" / "oracles.json"
    path.write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
