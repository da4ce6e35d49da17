"""Seeded random-graph samplers and Monte Carlo ensemble averages."""
from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Union

import numpy as np

from ._seeding import derive_seed, rng
from .graph import Graph, build_graph


class EnsembleError(ValueError):
    pass


class InfeasibleDegreesError(EnsembleError):
    pass


class ObservableError(RuntimeError):
    """An observable raised on one ensemble draw; ``index`` names the draw."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"observable failed on sample {index}: {cause!r}")
        self.index = index
        self.cause = cause


def _check_prob(p: float, name: str = "p") -> None:
    if not (0.0 <= p <= 1.0):
        raise EnsembleError(f"{name}={p} outside [0, 1]")


@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    p: float

    def __post_init__(self):
        _check_prob(self.p)
        if self.n < 1:
            raise EnsembleError("ErdosRenyi needs n >= 1")

    def sample(self, seed: int) -> Graph:
        return sample_er(self.n, self.p, seed)


@dataclass(frozen=True)
class BipartiteRegular:
    n_bits: int
    m_checks: int
    q: int
    r: int
    burn_in: int | None = None

    def __post_init__(self):
        _check_bipartite(self.n_bits, self.m_checks, self.q, self.r)

    def sample(self, seed: int) -> Graph:
        return sample_bipartite_regular(
            self.n_bits, self.m_checks, self.q, self.r, self.burn_in, seed
        )


@dataclass(frozen=True)
class PlantedBridge:
    n1: int
    n2: int
    k: int
    p_intra: float

    def __post_init__(self):
        _check_prob(self.p_intra, "p_intra")
        if self.n1 < 1 or self.n2 < 1 or self.k < 0:
            raise EnsembleError("PlantedBridge needs n1, n2 >= 1 and k >= 0")

    def sample(self, seed: int) -> Graph:
        return sample_planted_bridge(self.n1, self.n2, self.k, self.p_intra, seed)[0]


EnsembleSpec = Union[ErdosRenyi, BipartiteRegular, PlantedBridge]


# ---------------------------------------------------------------------------
# Erdos-Renyi


@functools.lru_cache(maxsize=8)
def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju


def _er_edges(n: int, p: float, gen: np.random.Generator) -> np.ndarray:
    iu, ju = _pairs(n)
    keep = gen.random(iu.size) < p
    return np.stack([iu[keep], ju[keep]], axis=1)


def sample_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p): each of the n(n-1)/2 pairs joined independently with probability p."""
    _check_prob(p)
    if n < 1:
        raise EnsembleError("sample_er needs n >= 1")
    e = _er_edges(n, p, rng(seed, 0))
    return build_graph(n, e.tolist())


def sample_planted_bridge(n1: int, n2: int, k: int, p_intra: float, seed: int):
    """Two independent G(n_i, p_intra) blocks joined by ``k`` uniform cross edges.

    Returns ``(graph, label)``; the label is always ``"nearly-disconnected"``.
    Cross edges are drawn with replacement, so k > n1*n2 can produce parallel edges.
    """
    _check_prob(p_intra, "p_intra")
    if n1 < 1 or n2 < 1 or k < 0:
        raise EnsembleError("planted bridge needs n1, n2 >= 1 and k >= 0")
    gen = rng(seed, 0)
    a = _er_edges(n1, p_intra, gen)
    b = _er_edges(n2, p_intra, gen) + n1
    cross = np.stack([gen.integers(0, n1, k), n1 + gen.integers(0, n2, k)], axis=1)
    edges = np.concatenate([a, b, cross.reshape(-1, 2)]).tolist()
    return build_graph(n1 + n2, edges), "nearly-disconnected"


# ---------------------------------------------------------------------------
# bipartite (q, r)-regular ensemble


def _check_bipartite(n: int, m: int, q: int, r: int) -> None:
    if min(n, m) < 1 or min(q, r) < 0:
        raise EnsembleError("bipartite ensemble needs n, m >= 1 and q, r >= 0")
    if n * q != m * r:
        raise InfeasibleDegreesError(f"n*q = {n * q} differs from m*r = {m * r}")
    if q > m or r > n:
        raise InfeasibleDegreesError(f"degrees (q={q}, r={r}) exceed side sizes (m={m}, n={n})")


def initial_biadjacency(n: int, m: int, q: int, r: int) -> np.ndarray:
    """Greedy valid start: each row takes the q columns with the most remaining capacity."""
    _check_bipartite(n, m, q, r)
    a = np.zeros((n, m), dtype=np.int8)
    cap = np.full(m, r)
    for i in range(n):
        # stable sort keeps ties in index order
        cols = np.argsort(-cap, kind="stable")[:q]
        if q and cap[cols[-1]] <= 0:
            raise InfeasibleDegreesError("no valid initial matrix")
        a[i, cols] = 1
        cap[cols] -= 1
    if (cap != 0).any():
        raise InfeasibleDegreesError("no valid initial matrix")
    return a


def switch_chain(
    n: int,
    m: int,
    q: int,
    r: int,
    *,
    burn_in: int | None = None,
    n_samples: int = 1,
    thin: int = 1,
    seed: int = 0,
    check_every_step: bool = False,
) -> Iterator[np.ndarray]:
    """Yield bi-adjacency matrices from the checkerboard switch chain.

    Each step proposes two rows and two columns uniformly; the swap is made when
    the 2x2 block is a checkerboard and otherwise the chain stays put.  Counting
    proposals (not accepted switches) keeps the stationary law uniform over the
    support.  Every step also holds with probability 1/2: without that the chain
    can be periodic (on 2x2 permutation matrices every proposal swaps).
    ``burn_in`` defaults to ``10 * n * q``.
    """
    a = initial_biadjacency(n, m, q, r)
    if burn_in is None:
        burn_in = 10 * n * q
    gen = rng(seed, 1)
    rows_q = np.full(n, q)
    cols_r = np.full(m, r)

    def step():
        if n < 2 or m < 2 or gen.random() < 0.5:
            return
        i, j = gen.choice(n, 2, replace=False)
        x, y = gen.choice(m, 2, replace=False)
        if a[i, x] == a[j, y] and a[i, y] == a[j, x] and a[i, x] != a[i, y]:
            a[i, x] ^= 1
            a[j, y] ^= 1
            a[i, y] ^= 1
            a[j, x] ^= 1
        if check_every_step:
            _assert_margins(a, rows_q, cols_r)

    for _ in range(burn_in):
        step()
    for s in range(n_samples):
        if s:
            for _ in range(thin):
                step()
        _assert_margins(a, rows_q, cols_r)
        yield a.copy()


def _assert_margins(a, rows_q, cols_r) -> None:
    if not (np.array_equal(a.sum(axis=1), rows_q) and np.array_equal(a.sum(axis=0), cols_r)):
        raise AssertionError("switch chain broke a row/column sum")


def biadjacency_to_graph(a: np.ndarray) -> Graph:
    n, m = a.shape
    ii, aa = np.nonzero(a)
    return build_graph(n + m, list(zip(ii.tolist(), (n + aa).tolist())))


def sample_bipartite_regular(n, m, q, r, burn_in, seed) -> Graph:
    """Bits are vertices ``0..n-1``, checks ``n..n+m-1``."""
    a = next(switch_chain(n, m, q, r, burn_in=burn_in, seed=seed))
    return biadjacency_to_graph(a)


def enumerate_biadjacency(n: int, m: int, q: int, r: int) -> list[np.ndarray]:
    """Every 0/1 matrix with row sums q and column sums r (brute force over rows)."""
    _check_bipartite(n, m, q, r)
    row_choices = [np.array([1 if c in s else 0 for c in range(m)], dtype=np.int8)
                   for s in itertools.combinations(range(m), q)]
    out = []
    for rows in itertools.product(row_choices, repeat=n):
        a = np.array(rows)
        if (a.sum(axis=0) == r).all():
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# ensemble averages


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int


def ensemble_expectation(
    spec: EnsembleSpec,
    f: Callable[[Graph], float],
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Sample mean and standard error of ``f`` over independent draws.

    Draw ``i`` uses the seed derived from ``(seed, i)``, so the result is the
    same for any ``workers``.
    """
    if n_samples < 1:
        raise EnsembleError("n_samples must be >= 1")

    def one(i: int) -> float:
        g = spec.sample(derive_seed(seed, i))
        try:
            return float(f(g))
        except Exception as exc:
            raise ObservableError(i, exc) from exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            vals = np.array(list(ex.map(one, range(n_samples))))
    else:
        vals = np.array([one(i) for i in range(n_samples)])
    se = float(vals.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return MonteCarloEstimate(float(vals.mean()), se, n_samples, seed)


def edge_count(g: Graph) -> int:
    return g.n_edges


def triangle_count(g: Graph) -> int:
    a = g.adjacency_matrix()
    return int(np.trace(a @ a @ a) // 6)
