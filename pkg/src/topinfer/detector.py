"""Local random-walk connectivity detector with majority-vote amplification.

The only read path to the graph is :class:`NeighborhoodOracle`, which hands
out the incident edge list of a queried vertex and records the query.  Seed
vertices are drawn knowing only ``n``.

Walkers are driven by a counter-based hash keyed by ``(seed, trial, pair,
side)``; a trial therefore gives bit-identical results whether it is run on
its own or batched with thousands of others (see :func:`detect_many`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._seeding import derive_seed, hash_uniform, parallel_map, splitmix64
from .ensembles import EnsembleSpec, PlantedBridge
from .graph import Graph, disjoint_union


class DetectorError(ValueError):
    pass


@dataclass(frozen=True)
class DetectorConfig:
    n_pairs: int = 8
    walk_length: int | None = None
    threshold: float = 0.5
    repetitions: int = 11

    def __post_init__(self):
        if self.n_pairs < 1:
            raise DetectorError("n_pairs must be >= 1")
        if self.walk_length is not None and self.walk_length < 1:
            raise DetectorError("walk_length must be >= 1")
        if self.repetitions < 1 or self.repetitions % 2 == 0:
            raise DetectorError("repetitions must be a positive odd number")
        if not 0.0 <= self.threshold <= 1.0:
            raise DetectorError("threshold must lie in [0, 1]")

    def length_for(self, n: int) -> int:
        return self.walk_length if self.walk_length is not None else default_walk_length(n)


def default_walk_length(n: int, c: float = 1.0) -> int:
    """``ceil(c * n)`` steps.

    Occupation-measure overlap only separates the two hypotheses once each walk
    visits every vertex of its component several times, so the length has to
    grow linearly in ``n``.
    """
    return max(1, math.ceil(c * n))


@dataclass
class AccessLog:
    """Locality witness: which vertices were queried and whether every
    edge handed out was incident to the queried vertex."""

    n_vertices: int
    queried: np.ndarray = field(init=False)
    n_queries: int = 0
    violations: int = 0

    def __post_init__(self):
        self.queried = np.zeros(self.n_vertices, dtype=bool)

    def vertices(self) -> set[int]:
        return set(np.flatnonzero(self.queried).tolist())

    def merge(self, other: "AccessLog") -> None:
        self.queried |= other.queried
        self.n_queries += other.n_queries
        self.violations += other.violations


class NeighborhoodOracle:
    """Incident-edge access to a graph, with every query logged."""

    def __init__(self, g: Graph):
        self.n_vertices = g.n_vertices
        self._indptr, self._nbr, self._eid = g.csr()
        owner = np.repeat(np.arange(g.n_vertices), np.diff(self._indptr))
        # slot s may be handed out for vertex owner[s] only if edge eid[s] touches it
        self._slot_incident = (g.u[self._eid] == owner) | (g.v[self._eid] == owner)
        self.log = AccessLog(g.n_vertices)

    def incident(self, v: int) -> list[tuple[int, int]]:
        if not 0 <= v < self.n_vertices:
            raise DetectorError(f"vertex {v} out of range")
        lo, hi = self._indptr[v], self._indptr[v + 1]
        self._record(np.array([v]), np.arange(lo, hi))
        return list(zip(self._eid[lo:hi].tolist(), self._nbr[lo:hi].tolist()))

    def step(self, v: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Move each walker along a uniformly chosen incident edge.

        ``u`` holds one uniform variate per walker.  Returns the new positions
        and a mask of walkers sitting on a degree-0 vertex (they stay put).
        """
        lo = self._indptr[v]
        deg = self._indptr[v + 1] - lo
        stuck = deg == 0
        if stuck.any():
            moving = ~stuck
            slots = (lo + np.minimum((u * deg).astype(np.int64), deg - 1))[moving]
            out = v.copy()
            out[moving] = self._nbr[slots]
        else:
            slots = lo + np.minimum((u * deg).astype(np.int64), deg - 1)
            out = self._nbr[slots]
        self._record(v, slots)
        return out, stuck

    def _record(self, queried: np.ndarray, slots: np.ndarray) -> None:
        self.log.queried[queried] = True
        self.log.n_queries += int(queried.size)
        if slots.size:
            self.log.violations += int(slots.size - np.count_nonzero(self._slot_incident[slots]))


@dataclass(frozen=True)
class TrialResult:
    statistic: float
    vote: bool
    pair_overlaps: tuple[float, ...]
    stuck_pairs: int


@dataclass(frozen=True)
class Verdict:
    decision: str
    votes_for_disconnected: int
    trials: int
    statistic_trace: tuple[float, ...]
    stuck_pairs: int = 0

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "votes_for_disconnected": self.votes_for_disconnected,
            "trials": self.trials,
            "statistic_trace": list(self.statistic_trace),
            "stuck_pairs": self.stuck_pairs,
        }


def _walker_keys(trial_seed: int, n_pairs: int) -> np.ndarray:
    idx = np.arange(2 * n_pairs, dtype=np.uint64)
    return splitmix64(np.uint64(trial_seed) ^ splitmix64(idx))


def _run_walkers(oracle, keys, starts_local, offsets, n_local, T):
    """Visit counts per walker over its own graph's local vertex ids."""
    w = len(keys)
    pos = offsets + starts_local
    counts = np.zeros(w * n_local, dtype=np.int64)
    stuck_any = np.zeros(w, dtype=bool)
    rows = np.arange(w, dtype=np.int64) * n_local
    chunk = max(1, min(T + 1, 2_000_000 // max(w, 1)))
    buf = np.empty((chunk, w), dtype=np.int64)
    filled = 0
    buf[filled] = rows + pos - offsets
    filled += 1
    for t in range(1, T + 1):
        pos, stuck = oracle.step(pos, hash_uniform(keys, t))
        stuck_any |= stuck
        if filled == chunk:
            counts += np.bincount(buf.ravel(), minlength=w * n_local)
            filled = 0
        buf[filled] = rows + pos - offsets
        filled += 1
    counts += np.bincount(buf[:filled].ravel(), minlength=w * n_local)
    return counts.reshape(w, n_local), stuck_any


def _trials(graphs: Sequence[Graph], trial_seeds: Sequence[int], graph_of_trial, cfg):
    """Run one trial per entry of ``trial_seeds`` on ``graphs[graph_of_trial[i]]``."""
    sizes = np.array([g.n_vertices for g in graphs])
    if (sizes < 1).any():
        raise DetectorError("detector needs a nonempty graph")
    union = graphs[0] if len(graphs) == 1 else disjoint_union(*graphs)
    oracle = NeighborhoodOracle(union)
    goffs = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    n_local = int(sizes.max())
    P = cfg.n_pairs
    keys, offs, nloc, lengths = [], [], [], []
    for s, gi in zip(trial_seeds, graph_of_trial):
        keys.append(_walker_keys(s, P))
        offs.append(np.full(2 * P, goffs[gi]))
        nloc.append(np.full(2 * P, sizes[gi]))
        lengths.append(cfg.length_for(int(sizes[gi])))
    if len(set(lengths)) != 1:
        raise DetectorError("batched trials must share one walk length")
    T = lengths[0]
    keys = np.concatenate(keys)
    offs = np.concatenate(offs).astype(np.int64)
    nloc = np.concatenate(nloc)
    starts = np.minimum((hash_uniform(keys, 0) * nloc).astype(np.int64), nloc - 1)
    counts, stuck = _run_walkers(oracle, keys, starts, offs, n_local, T)
    a = counts[0::2]
    b = counts[1::2]
    overlaps = np.minimum(a, b).sum(axis=1) / (T + 1)
    pair_stuck = stuck[0::2] | stuck[1::2]
    overlaps = np.where(pair_stuck, 0.0, overlaps).reshape(-1, P)
    pair_stuck = pair_stuck.reshape(-1, P)
    out = []
    for ov, st in zip(overlaps, pair_stuck):
        stat = float(ov.mean())
        out.append(TrialResult(stat, stat < cfg.threshold, tuple(ov.tolist()), int(st.sum())))
    return out, oracle.log


def single_trial(g: Graph, cfg: DetectorConfig, seed: int, *, log: AccessLog | None = None) -> TrialResult:
    """One pass of ``n_pairs`` independent walker pairs.

    The statistic is the mean, over pairs, of ``sum_v min(f_a(v), f_b(v))``
    where ``f`` is a walker's empirical visit frequency.  Low overlap votes
    "suspect-disconnected".
    """
    (res,), lg = _trials([g], [seed], [0], cfg)
    if log is not None:
        log.merge(lg)
    return res


def _verdict(results: Sequence[TrialResult]) -> Verdict:
    votes = sum(r.vote for r in results)
    decision = "suspect-disconnected" if votes > len(results) / 2 else "connected"
    return Verdict(
        decision,
        votes,
        len(results),
        tuple(r.statistic for r in results),
        sum(r.stuck_pairs for r in results),
    )


def detect(g: Graph, cfg: DetectorConfig, seed: int, *, log: AccessLog | None = None) -> Verdict:
    """Majority vote over ``cfg.repetitions`` trials with derived seeds."""
    seeds = [derive_seed(seed, r) for r in range(cfg.repetitions)]
    results, lg = _trials([g], seeds, [0] * len(seeds), cfg)
    if log is not None:
        log.merge(lg)
    return _verdict(results)


def detect_many(
    graphs: Sequence[Graph],
    cfg: DetectorConfig,
    seeds: Sequence[int],
    *,
    batch: int = 32,
    log: AccessLog | None = None,
) -> list[Verdict]:
    """``[detect(g, cfg, s) for g, s in zip(graphs, seeds)]``, vectorized in batches.

    The per-graph logs of a batch live on the disjoint union; ``log`` (if
    given) only accumulates query counts and violations.
    """
    out: list[Verdict] = []
    R = cfg.repetitions
    for lo in range(0, len(graphs), batch):
        gs = list(graphs[lo:lo + batch])
        ss = seeds[lo:lo + batch]
        tseeds = [derive_seed(s, r) for s in ss for r in range(R)]
        gidx = [i for i in range(len(gs)) for _ in range(R)]
        results, lg = _trials(gs, tseeds, gidx, cfg)
        _accumulate(log, lg)
        out.extend(_verdict(results[i * R:(i + 1) * R]) for i in range(len(gs)))
    return out


def _accumulate(log: AccessLog | None, lg: AccessLog) -> None:
    if log is not None:
        log.n_queries += lg.n_queries
        log.violations += lg.violations


def trial_statistics(
    spec: EnsembleSpec, cfg: DetectorConfig, n: int, seed: int, *, batch: int = 64, log: AccessLog | None = None
) -> np.ndarray:
    """Single-trial statistics on ``n`` fresh draws of ``spec``."""
    out = []
    for lo in range(0, n, batch):
        idx = range(lo, min(n, lo + batch))
        gs = [spec.sample(derive_seed(seed, i, 0)) for i in idx]
        res, lg = _trials(gs, [derive_seed(seed, i, 1) for i in idx], list(range(len(gs))), cfg)
        _accumulate(log, lg)
        out.extend(r.statistic for r in res)
    return np.array(out)


@dataclass(frozen=True)
class Calibration:
    threshold: float
    config: DetectorConfig
    balanced_error: float
    roc: list[dict]


def roc_table(pos: np.ndarray, neg: np.ndarray) -> list[dict]:
    """Rates of the rule ``statistic < theta`` at every cut between observed values."""
    vals = np.unique(np.concatenate([pos, neg]))
    cuts = np.concatenate([[vals[0]], (vals[:-1] + vals[1:]) / 2, [np.nextafter(vals[-1], np.inf)]])
    ps, ns = np.sort(pos), np.sort(neg)
    tpr = np.searchsorted(ps, cuts, side="left") / len(ps)
    fpr = np.searchsorted(ns, cuts, side="left") / len(ns)
    be = ((1 - tpr) + fpr) / 2
    return [
        {"threshold": float(c), "tpr": float(t), "fpr": float(f), "balanced_error": float(b)}
        for c, t, f, b in zip(cuts, tpr, fpr, be)
    ]


def calibrate_threshold(
    positive: EnsembleSpec,
    negative: EnsembleSpec,
    cfg_grid,
    n_cal: int,
    seed: int,
    *,
    log: AccessLog | None = None,
) -> Calibration:
    """Pick the threshold (and config, if a grid is given) minimizing balanced error.

    ``positive`` draws are the nearly-disconnected class.  Each calibration
    sample is one fresh graph and one trial.
    """
    if n_cal < 2:
        raise DetectorError("calibration needs n_cal >= 2 per class")
    grid = [cfg_grid] if isinstance(cfg_grid, DetectorConfig) else list(cfg_grid)
    best = None
    for gi, cfg in enumerate(grid):
        pos = trial_statistics(positive, cfg, n_cal, derive_seed(seed, gi, 0), log=log)
        neg = trial_statistics(negative, cfg, n_cal, derive_seed(seed, gi, 1), log=log)
        if np.ptp(np.concatenate([pos, neg])) == 0:
            raise DetectorError("degenerate calibration: every statistic is identical")
        roc = roc_table(pos, neg)
        row = min(roc, key=lambda r: (r["balanced_error"], -r["threshold"]))
        cand = Calibration(
            row["threshold"],
            DetectorConfig(cfg.n_pairs, cfg.walk_length, row["threshold"], cfg.repetitions),
            row["balanced_error"],
            roc,
        )
        if best is None or cand.balanced_error < best.balanced_error:
            best = cand
    return best


def detection_rate(
    spec: EnsembleSpec, cfg: DetectorConfig, n_runs: int, seed: int, *, batch: int = 32,
    log: AccessLog | None = None,
) -> tuple[float, list[Verdict]]:
    """Fraction of ``n_runs`` fresh draws judged suspect-disconnected."""
    verdicts: list[Verdict] = []
    for lo in range(0, n_runs, batch):
        idx = range(lo, min(n_runs, lo + batch))
        graphs = [spec.sample(derive_seed(seed, i, 0)) for i in idx]
        verdicts.extend(detect_many(graphs, cfg, [derive_seed(seed, i, 1) for i in idx], batch=batch, log=log))
    rate = sum(v.decision == "suspect-disconnected" for v in verdicts) / n_runs
    return rate, verdicts


def phase_sweep(
    n: int,
    k_values,
    p_intra: float,
    cfg: DetectorConfig,
    n_runs: int,
    seed: int,
    *,
    workers: int = 1,
) -> list[dict]:
    """Detection rate against the number of planted cross edges between two halves."""

    def row(k: int) -> dict:
        spec = PlantedBridge(n // 2, n - n // 2, k, p_intra)
        log = AccessLog(0)
        rate, _ = detection_rate(spec, cfg, n_runs, derive_seed(seed, k), log=log)
        se = math.sqrt(max(rate * (1 - rate), 1.0 / n_runs) / n_runs)
        return {"k": k, "detection_rate": rate, "std_error": se, "runs": n_runs,
                "locality_violations": log.violations}

    return parallel_map(row, [int(k) for k in k_values], workers)
