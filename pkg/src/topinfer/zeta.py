"""Ihara zeta function of a finite graph and the invariants it generates.

The reciprocal ``1/zeta(u)`` is a polynomial with integer coefficients.  It
is computed exactly from the Bass determinant

    1/zeta(u) = (1 - u^2)^(|E| - |V|) * det(I - u A + u^2 (D - I))

by evaluating the right-hand side at integer nodes and interpolating.  Each
invariant has an independent brute-force route so the two can be compared:

* prime-loop census -> truncated Euler product     vs. the Bass polynomial
* traces of Hashimoto-matrix powers                  vs. log-derivative series
* Matrix-Tree cofactor                               vs. derivative at u = 1
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ._exact import (
    bareiss_det,
    interpolate,
    interpolation_nodes,
    poly_derivative,
    poly_eval,
    poly_mul,
    poly_pow,
    series_inverse,
)
from .graph import ArcIndex, Graph, connected_components, euler_characteristic, inflate


class ZetaError(ValueError):
    pass


class WeightedGraphError(ZetaError):
    pass


class PreconditionError(ZetaError):
    pass


class IdentityDegenerateError(ZetaError):
    pass


class ConsistencyError(AssertionError):
    """Two independent routes to the same invariant disagree."""


MAX_LOOP_LEN = 14


@dataclass(frozen=True)
class ZetaPolynomial:
    """Integer coefficients of 1/zeta(u); ``coeffs[j]`` multiplies ``u**j``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ConsistencyError("1/zeta must have constant term 1")
        if any(type(c) is not int for c in self.coeffs):
            raise TypeError("coefficients must be Python ints")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, u):
        return poly_eval(self.coeffs, u)

    def derivative_at(self, n: int, u=1):
        return poly_eval(poly_derivative(self.coeffs, n), u)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


def _require_unit(g: Graph) -> None:
    if not g.is_unit_weight:
        raise WeightedGraphError("graph has non-unit weights; call inflate() first")


def _require_md2(g: Graph) -> None:
    _require_unit(g)
    if g.n_vertices == 0:
        raise PreconditionError("empty graph")
    count, _ = connected_components(g)
    if count != 1:
        raise PreconditionError("graph is disconnected")
    if (g.degrees() < 2).any():
        raise PreconditionError("graph has a vertex of degree < 2")


def hashimoto_matrix(g: Graph) -> np.ndarray:
    """Non-backtracking arc matrix: B[a, b] = 1 iff head(a) = tail(b) and b != reverse(a)."""
    _require_unit(g)
    arcs = ArcIndex.from_graph(g)
    m2 = len(arcs)
    b = np.zeros((m2, m2), dtype=np.int64)
    by_tail: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for a in range(m2):
        by_tail[arcs.tail[a]].append(a)
    for a in range(m2):
        for c in by_tail[arcs.head[a]]:
            if c != (a ^ 1):
                b[a, c] = 1
    return b


def _bass_value(adj: list[list[int]], deg: list[int], chi: int, u: int) -> int:
    n = len(adj)
    m = [[(1 + u * u * (deg[i] - 1) if i == j else 0) - u * adj[i][j] for j in range(n)]
         for i in range(n)]
    return (1 - u * u) ** chi * bareiss_det(m)


def zeta_reciprocal(g: Graph) -> ZetaPolynomial:
    """Exact 1/zeta(u) of a connected unit-weight graph with minimum degree 2."""
    _require_md2(g)
    chi = euler_characteristic(g)
    adj = g.adjacency_matrix().tolist()
    deg = g.degrees().tolist()
    deg_out = 2 * g.n_edges
    nodes = interpolation_nodes(deg_out + 1)
    values = [_bass_value(adj, deg, chi, u) for u in nodes]
    coeffs = interpolate(nodes, values)
    if any(c.denominator != 1 for c in coeffs):
        raise ConsistencyError("interpolated 1/zeta has non-integer coefficients")
    ints = [int(c) for c in coeffs]
    if ints[-1] == 0:
        raise ConsistencyError(f"1/zeta degree below 2|E| = {deg_out}")
    return ZetaPolynomial(tuple(ints))


def weighted_zeta_reciprocal(g: Graph) -> ZetaPolynomial:
    """1/zeta of a weighted graph, via the inflated unit-weight graph."""
    return zeta_reciprocal(inflate(g))


# ---------------------------------------------------------------------------
# brute-force prime-loop census


def _is_primitive(seq: Sequence[int]) -> bool:
    n = len(seq)
    for d in range(1, n):
        if n % d == 0 and all(seq[i] == seq[(i + d) % n] for i in range(n)):
            return False
    return True


def _is_min_rotation(seq: Sequence[int]) -> bool:
    t = tuple(seq)
    n = len(t)
    return all(t <= t[i:] + t[:i] for i in range(1, n))


def enumerate_prime_loops(g: Graph, max_len: int) -> list[int]:
    """``[pi(0), pi(1), ..., pi(max_len)]`` by exhaustive search over arc sequences.

    A loop is a cyclic sequence of arcs with no backtracking, including across
    the closing step (no tail), that is not a power of a shorter loop.  Loops
    are identified under rotation only, so a loop and its reversal both count.
    Each class is counted at its lexicographically smallest rotation; the
    search only extends with arcs not smaller than the starting arc.
    """
    _require_unit(g)
    if max_len > MAX_LOOP_LEN:
        raise ZetaError(f"max_len {max_len} exceeds the oracle budget of {MAX_LOOP_LEN}")
    arcs = ArcIndex.from_graph(g)
    tail = arcs.tail.tolist()
    head = arcs.head.tolist()
    m2 = len(tail)
    by_tail: list[list[int]] = [[] for _ in range(g.n_vertices)]
    for a in range(m2):
        by_tail[tail[a]].append(a)
    pi = [0] * (max_len + 1)

    for s in range(m2):
        start_vertex = tail[s]
        rev_s = s ^ 1
        seq = [s]

        def extend():
            a = seq[-1]
            L = len(seq)
            if head[a] == start_vertex and a != rev_s and _is_primitive(seq) and _is_min_rotation(seq):
                pi[L] += 1
            if L == max_len:
                return
            for b in by_tail[head[a]]:
                if b < s or b == (a ^ 1):
                    continue
                seq.append(b)
                extend()
                seq.pop()

        extend()
    return pi


def euler_product_truncation(prime_counts: Sequence[int], M: int) -> list[int]:
    """Coefficients of prod_m (1 - u^m)^pi(m) up to u^M.

    ``prime_counts[m]`` is the number of prime loops of length m; entries
    beyond M are ignored, missing entries below M are an error.
    """
    if len(prime_counts) < M + 1:
        raise ZetaError(f"prime counts only reach length {len(prime_counts) - 1} < {M}")
    out = [1] + [0] * M
    for m in range(1, M + 1):
        k = prime_counts[m]
        if k:
            factor = [1] + [0] * (m - 1) + [-1]
            out = poly_mul(out, poly_pow(factor, k, M), M)
    return out + [0] * (M + 1 - len(out))


# ---------------------------------------------------------------------------
# closed non-backtracking loops N_m


def loop_counts_trace(g: Graph, M: int) -> list[int]:
    """``[N_1, ..., N_M]`` as traces of powers of the Hashimoto matrix (exact ints)."""
    b = hashimoto_matrix(g).astype(object)
    out = []
    p = b
    for m in range(1, M + 1):
        if m > 1:
            p = p.dot(b)
        out.append(int(np.trace(p)))
    return out


def loop_counts_logderiv(zp: ZetaPolynomial, M: int) -> list[int]:
    """``[N_1, ..., N_M]`` as the series of u d/du log zeta = -u P'(u) / P(u)."""
    inv = series_inverse(zp.coeffs, M)
    dp = poly_derivative(zp.coeffs)
    s = poly_mul(dp, inv, M)
    s = s + [0] * (M + 1 - len(s))
    # coefficient of u^m in -u P'/P is -s[m-1]
    return [-s[m - 1] for m in range(1, M + 1)]


def loop_counts(g: Graph, M: int) -> list[int]:
    """``[N_1, ..., N_M]``, computed both ways and required to agree exactly."""
    a = loop_counts_trace(g, M)
    b = loop_counts_logderiv(zeta_reciprocal(g), M)
    if a != b:
        raise ConsistencyError(f"trace route {a} differs from log-derivative route {b}")
    return a


# ---------------------------------------------------------------------------
# spanning trees


def spanning_tree_count(g: Graph) -> int:
    """Matrix-Tree theorem: any cofactor of the combinatorial Laplacian."""
    count, _ = connected_components(g)
    if g.n_vertices == 0 or count != 1:
        raise PreconditionError("spanning trees need a connected graph")
    a = g.adjacency_matrix()
    lap = np.diag(a.sum(axis=1)) - a
    return bareiss_det(lap[1:, 1:].tolist())


def circuit_rank(g: Graph) -> int:
    count, _ = connected_components(g)
    return g.n_edges - g.n_vertices + count


def kappa_from_zeta(zp: ZetaPolynomial, rank: int) -> int:
    """Spanning-tree count from the rank-th derivative of 1/zeta at u = 1.

    Inverts  P^(n)(1) = n! (-1)^(n+1) 2^n (n-1) kappa  with n the circuit rank.
    At rank 1 the factor (n-1) vanishes and nothing can be recovered.
    """
    if rank < 2:
        raise IdentityDegenerateError(f"circuit rank {rank} < 2: the identity reads 0 = 0")
    value = zp.derivative_at(rank, 1)
    denom = math.factorial(rank) * (-1) ** (rank + 1) * 2 ** rank * (rank - 1)
    kappa = Fraction(value, denom)
    if kappa.denominator != 1:
        raise ConsistencyError(f"derivative {value} is not a multiple of {denom}")
    return int(kappa)


# ---------------------------------------------------------------------------
# radius of convergence and prime-loop asymptotics


def radius_of_convergence(
    g: Graph, *, tol: float = 1e-10, max_iter: int = 200_000
) -> tuple[float, float]:
    """``(R, err)`` with R = 1 / Perron eigenvalue of the Hashimoto matrix.

    Power iteration runs on B + I, which is primitive even when B is periodic
    (cycles, bipartite graphs).  The Collatz-Wielandt ratios min/max of
    ``(B+I)x / x`` bracket the eigenvalue; ``err`` is the width of the
    resulting bracket on R.
    """
    _require_md2(g)
    b = sp.csr_matrix(hashimoto_matrix(g).astype(np.float64))
    shifted = b + sp.identity(b.shape[0], format="csr")
    x = np.ones(b.shape[0])
    lo = hi = None
    for _ in range(max_iter):
        y = shifted @ x
        ratio = y / x
        lo, hi = ratio.min(), ratio.max()
        if hi - lo <= tol * hi:
            break
        x = y / np.linalg.norm(y)
    else:
        raise ZetaError(f"power iteration did not converge in {max_iter} steps (gap {hi - lo:.3g})")
    lam = 0.5 * (lo + hi) - 1.0
    r_hi = 1.0 / (lo - 1.0) if lo > 1.0 else math.inf
    r_lo = 1.0 / (hi - 1.0)
    return float(1.0 / lam), float(r_hi - r_lo)


def delta_from_primes(prime_counts: Sequence[int]) -> int:
    """gcd of the lengths carrying at least one prime loop."""
    lengths = [m for m, c in enumerate(prime_counts) if m > 0 and c > 0]
    if not lengths:
        raise ZetaError("no prime loops in range: the gcd of loop lengths is undefined")
    return reduce(math.gcd, lengths)


@dataclass(frozen=True)
class TopologicalSummary:
    loop_counts: tuple[int, ...]
    spanning_trees: int
    radius: float
    radius_err: float
    delta: int
    prime_counts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "loop_counts": {str(m): str(c) for m, c in enumerate(self.loop_counts, start=1)},
            "spanning_trees": str(self.spanning_trees),
            "radius": self.radius,
            "radius_err": self.radius_err,
            "delta": self.delta,
            "prime_counts": {str(m): c for m, c in enumerate(self.prime_counts) if m > 0},
        }


def topological_summary(g: Graph, M: int, *, prime_len: int | None = None) -> TopologicalSummary:
    """Everything at once.  Prime counts come from the brute-force census up to
    ``prime_len`` (default ``min(M, 14)``)."""
    prime_len = min(M, MAX_LOOP_LEN) if prime_len is None else prime_len
    pi = enumerate_prime_loops(g, prime_len)
    r, err = radius_of_convergence(g)
    return TopologicalSummary(
        tuple(loop_counts(g, M)),
        spanning_tree_count(g),
        r,
        err,
        delta_from_primes(pi),
        tuple(pi),
    )


def prime_asymptotics_check(summary: TopologicalSummary, M: int | None = None) -> list[dict]:
    """Compare pi(m) with Delta * R^-m / m at the lengths m that are multiples of Delta."""
    pi = summary.prime_counts
    top = len(pi) - 1 if M is None else min(M, len(pi) - 1)
    rows = []
    for m in range(summary.delta, top + 1, summary.delta):
        lead = summary.delta * summary.radius ** (-m) / m
        rows.append({
            "m": m,
            "prime_count": pi[m],
            "leading_term": lead,
            "relative_error": abs(pi[m] - lead) / lead,
        })
    return rows
