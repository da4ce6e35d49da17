"""Random walks on graphs and the one-dimensional asymmetric walk.

The transition operator is ``T = D^-1 A`` (row-stochastic, parallel edges
counted with multiplicity) and distributions are row vectors, so one step is
``p <- p @ T`` and the graph Laplacian is ``T - I``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._seeding import derive_seed, hash_uniform, splitmix64
from .graph import Graph


class WalkError(ValueError):
    pass


class StuckWalkError(WalkError):
    pass


@dataclass(frozen=True)
class WalkDistribution:
    probs: np.ndarray
    time: int = 0

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-12:
            raise WalkError("a walk distribution must be non-negative and sum to 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def point_mass(cls, n: int, v: int) -> "WalkDistribution":
        p = np.zeros(n)
        p[v] = 1.0
        return cls(p)


def transition_matrix(g: Graph, lazy: bool = False) -> np.ndarray:
    """Row-stochastic ``D^-1 A``; rows of isolated vertices are left at zero."""
    a = g.adjacency_matrix().astype(np.float64)
    deg = a.sum(axis=1)
    t = np.divide(a, deg[:, None], out=np.zeros_like(a), where=deg[:, None] > 0)
    if lazy:
        t = 0.5 * (np.eye(g.n_vertices) + t)
    return t


def evolve_distribution(
    g: Graph, p0: WalkDistribution | np.ndarray, steps: int, *, lazy: bool = False
) -> WalkDistribution:
    """Apply ``steps`` walk steps.  ``lazy`` uses (I + T)/2 to kill periodicity."""
    if not isinstance(p0, WalkDistribution):
        p0 = WalkDistribution(p0)
    t = transition_matrix(g, lazy)
    isolated = g.degrees() == 0
    p = p0.probs.copy()
    for _ in range(steps):
        if (p[isolated] > 0).any():
            raise StuckWalkError("probability mass on an isolated vertex has nowhere to go")
        p = p @ t
    if abs(p.sum() - 1.0) > 1e-12:
        raise AssertionError(f"mass drifted to {p.sum()!r}")
    return WalkDistribution(p, p0.time + steps)


def two_point_correlator(g: Graph, v: int, w: int, n: int) -> float:
    """P(walker at v at time n | walker at w at time 0) = [T^n]_{w, v}."""
    deg = g.degrees()
    if n > 0 and deg[w] == 0:
        raise StuckWalkError(f"vertex {w} is isolated")
    t = transition_matrix(g)
    return float(np.linalg.matrix_power(t, n)[w, v])


def diagonal_loop_link(g: Graph, v: int, n: int) -> tuple[float, int]:
    """``([T^n]_{vv}, [A^n]_{vv})``.

    The integer is the number of closed walks of length n at v with
    backtracking allowed; it is not the non-backtracking loop count of the
    zeta module.
    """
    if not g.is_unit_weight:
        raise WalkError("diagonal_loop_link expects unit weights")
    a = g.adjacency_matrix().astype(object)
    x = np.zeros(g.n_vertices, dtype=object)
    x[:] = 0
    x[v] = 1
    for _ in range(n):
        x = a.dot(x)
    t = transition_matrix(g)
    return float(np.linalg.matrix_power(t, n)[v, v]), int(x[v])


def closed_walk_trace(g: Graph, n: int) -> int:
    """Trace of A^n as an exact integer (sum of closed walks of length n)."""
    a = g.adjacency_matrix().astype(object)
    return int(np.trace(np.linalg.matrix_power(a, n))) if n else g.n_vertices


# ---------------------------------------------------------------------------
# Monte Carlo trajectories


def _trajectory_keys(seed: int, n_walks: int) -> np.ndarray:
    return splitmix64(np.uint64(derive_seed(seed)) ^ splitmix64(np.arange(n_walks, dtype=np.uint64)))


def simulate_walks(g: Graph, v0: int, steps: int, n_walks: int, seed: int) -> np.ndarray:
    """``(n_walks, steps + 1)`` array of trajectories.

    Trajectory ``i`` depends only on ``(seed, i)``; each move is uniform over
    the incident edges of the current vertex.
    """
    if not 0 <= v0 < g.n_vertices:
        raise WalkError(f"start vertex {v0} out of range")
    indptr, nbr, _ = g.csr()
    keys = _trajectory_keys(seed, n_walks)
    out = np.empty((n_walks, steps + 1), dtype=np.int64)
    pos = np.full(n_walks, v0, dtype=np.int64)
    out[:, 0] = pos
    for t in range(1, steps + 1):
        lo = indptr[pos]
        deg = indptr[pos + 1] - lo
        if (deg == 0).any():
            raise StuckWalkError(f"walk stuck at an isolated vertex at step {t}")
        u = hash_uniform(keys, t)
        pos = nbr[lo + np.minimum((u * deg).astype(np.int64), deg - 1)]
        out[:, t] = pos
    return out


def simulate_walk(g: Graph, v0: int, steps: int, seed: int) -> list[int]:
    return simulate_walks(g, v0, steps, 1, seed)[0].tolist()


def occupancy(trajectories: np.ndarray, n_vertices: int) -> np.ndarray:
    """``(steps + 1, n_vertices)`` empirical probability of being at each vertex."""
    n_walks, length = trajectories.shape
    out = np.zeros((length, n_vertices))
    for t in range(length):
        out[t] = np.bincount(trajectories[:, t], minlength=n_vertices) / n_walks
    return out


# ---------------------------------------------------------------------------
# asymmetric walk on Z


@dataclass(frozen=True)
class ReturnSeries:
    p: float
    probs: np.ndarray


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise WalkError(f"p={p} outside [0, 1]")


def return_probs_combinatorial(p: float, M: int) -> np.ndarray:
    """P_n = C(n, n/2) (pq)^(n/2) for even n, else 0."""
    _check_p(p)
    pq = p * (1 - p)
    out = np.zeros(M + 1)
    for k in range(M // 2 + 1):
        out[2 * k] = math.comb(2 * k, k) * pq ** k
    return out


def return_probs_series(p: float, M: int) -> np.ndarray:
    """Coefficients of z^-(n+1) in (z^2 - 4pq)^(-1/2), by the binomial-series recurrence."""
    _check_p(p)
    x = 4 * p * (1 - p)
    out = np.zeros(M + 1)
    c = 1.0
    out[0] = c
    for k in range(1, M // 2 + 1):
        # (1 - x/z^2)^(-1/2): c_k = c_{k-1} * (2k - 1) / (2k) * x
        c *= (2 * k - 1) / (2 * k) * x
        out[2 * k] = c
    return out


def return_prob_contour(p: float, n: int, *, radius: float | None = None, nodes: int = 4096) -> float:
    """P_n = (1 / 2 pi i) * contour integral of z^n G(z) dz, by the trapezoid rule.

    G(z) = 1 / sqrt(z^2 - 4pq), taken as z^-1 (1 - 4pq/z^2)^(-1/2) on a circle
    outside the branch points.
    """
    _check_p(p)
    pq = p * (1 - p)
    if radius is None:
        radius = 2 * math.sqrt(pq) + 0.05
    theta = 2 * np.pi * np.arange(nodes) / nodes
    z = radius * np.exp(1j * theta)
    g = 1.0 / (z * np.sqrt(1 - 4 * pq / z ** 2))
    # dz = i z dtheta
    val = np.mean(z ** (n + 1) * g)
    return float(val.real)


def asym_return_probs(p: float, M: int, *, tol: float = 1e-12) -> ReturnSeries:
    """Return probabilities P_0..P_M of the walk stepping right w.p. p.

    Computed combinatorially and from the generating function; the two must
    agree to ``tol``.
    """
    a = return_probs_combinatorial(p, M)
    b = return_probs_series(p, M)
    if np.max(np.abs(a - b)) > tol:
        raise AssertionError(f"series and combinatorial return probabilities differ by {np.max(np.abs(a - b))}")
    return ReturnSeries(p, a)


def simulate_asym_returns(p: float, M: int, n_walks: int, seed: int) -> np.ndarray:
    """Empirical P(at 0 after n steps) for n = 0..M from ``n_walks`` walks on Z."""
    _check_p(p)
    gen = np.random.Generator(np.random.PCG64(derive_seed(seed)))
    steps = np.where(gen.random((n_walks, M)) < p, 1, -1).astype(np.int64)
    pos = np.concatenate([np.zeros((n_walks, 1), np.int64), np.cumsum(steps, axis=1)], axis=1)
    return (pos == 0).mean(axis=0)


# ---------------------------------------------------------------------------
# continuum reference


def gaussian_kernel_reference(d: int, t: float, s: float, r1, r2) -> float:
    """Continuum heat kernel in R^(d/2) in the normalization used for the
    lattice-to-continuum comparison: ((2 pi)^(d/2) * 2 (t - s))^(-1/2) exp(-|r1 - r2|^2 / (2 (t - s)))."""
    if d % 2 or d <= 0:
        raise WalkError("d must be a positive even integer")
    if t <= s:
        raise WalkError("kernel needs t > s")
    diff = np.atleast_1d(np.asarray(r1, float) - np.asarray(r2, float))
    if diff.size != d // 2:
        raise WalkError(f"points must live in R^{d // 2}")
    pref = 1.0 / math.sqrt((2 * math.pi) ** (d / 2) * 2 * (t - s))
    return pref * math.exp(-float(diff @ diff) / (2 * (t - s)))


def continuum_comparison(times) -> list[dict]:
    """Diagnostic table for d = 2 (the line): lattice return probability P_{2k}
    of the symmetric walk, rescaled by sqrt(2k), next to the kernel diagonal."""
    rows = []
    times = list(times)
    P = return_probs_combinatorial(0.5, 2 * max(times))
    for k in times:
        lat = P[2 * k]
        kern = gaussian_kernel_reference(2, 2 * k, 0, [0.0], [0.0])
        rows.append({
            "steps": 2 * k,
            "lattice_return": lat,
            "lattice_rescaled": lat * math.sqrt(2 * k),
            "kernel_diagonal": kern,
            "kernel_rescaled": kern * math.sqrt(2 * k),
        })
    return rows
