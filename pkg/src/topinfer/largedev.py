"""Large deviations: Cramer rates, SCGF estimation, Legendre transforms, and
Girsanov reweighting of interacting diffusions.

All exponential averages go through ``logsumexp``.  Stochastic integrals use
the Ito (left-endpoint) convention everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from ._seeding import parallel_map, rng


class LDPError(ValueError):
    pass


class DiffusionBlowup(FloatingPointError):
    def __init__(self, step: int):
        super().__init__(f"non-finite drift at step {step}")
        self.step = step


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class Bernoulli:
    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise LDPError("Bernoulli needs 0 < p < 1")

    @property
    def mean(self) -> float:
        return self.p

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        return (gen.random(size) < self.p).astype(np.float64)

    def sample_sum(self, gen: np.random.Generator, n: int, size: int) -> np.ndarray:
        return gen.binomial(n, self.p, size).astype(np.float64)

    def scgf(self, t):
        t = np.asarray(t, dtype=float)
        return np.logaddexp(np.log1p(-self.p), np.log(self.p) + t)

    def upper_tail(self, n: int, x: float) -> float:
        """Exact P(mean of n draws >= x)."""
        k = math.ceil(n * x - 1e-9)
        return float(stats.binom.sf(k - 1, n, self.p))


@dataclass(frozen=True)
class Gaussian:
    mu: float = 0.0
    sigma: float = 1.0

    @property
    def mean(self) -> float:
        return self.mu

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        return gen.normal(self.mu, self.sigma, size)

    def sample_sum(self, gen: np.random.Generator, n: int, size: int) -> np.ndarray:
        return gen.normal(n * self.mu, math.sqrt(n) * self.sigma, size)

    def scgf(self, t):
        t = np.asarray(t, dtype=float)
        return self.mu * t + 0.5 * (self.sigma * t) ** 2

    def upper_tail(self, n: int, x: float) -> float:
        return float(stats.norm.sf((x - self.mu) * math.sqrt(n) / self.sigma))


def cramer_rate_analytic(dist, x: float) -> float:
    """Closed-form rate function; ``inf`` outside the attainable range."""
    if isinstance(dist, Gaussian):
        return (x - dist.mu) ** 2 / (2 * dist.sigma ** 2)
    if isinstance(dist, Bernoulli):
        p = dist.p
        if x < 0 or x > 1:
            return math.inf
        out = 0.0
        if x > 0:
            out += x * math.log(x / p)
        if x < 1:
            out += (1 - x) * math.log((1 - x) / (1 - p))
        return out
    raise LDPError(f"no closed form for {dist!r}")


def cramer_rate_upper(dist, x: float) -> float:
    """sup over t > 0 only: the rate governing P(mean >= x); zero below the mean."""
    return cramer_rate_analytic(dist, x) if x > dist.mean else 0.0


# ---------------------------------------------------------------------------
# SCGF and Legendre transform


@dataclass(frozen=True)
class SCGFEstimate:
    t_grid: np.ndarray
    lambda_hat: np.ndarray
    n: int
    n_samples: int
    method: str
    reliable: np.ndarray = field(repr=False)


def _ess_fraction(logw: np.ndarray) -> float:
    w = np.exp(logw - logw.max())
    return float(w.sum() ** 2 / (w @ w) / len(w))


def empirical_scgf(
    sampler,
    n: int,
    t_grid,
    n_samples: int,
    seed: int,
    *,
    method: str = "factorized",
    min_ess: float = 1e-3,
) -> SCGFEstimate:
    """Estimate Lambda(t) = lim n^-1 log E exp(t Z_n) from ``n_samples`` sums of ``n`` draws.

    ``method="direct"`` averages exp(t Z_n) over the sums themselves.  Its
    reach is limited: once the tilted mean of Z_n sits several standard
    deviations outside the sampled sums, the average is dominated by the
    single largest sample and the estimate flattens into a line.  Such grid
    points are marked unreliable (tilted effective sample size below
    ``min_ess``).

    ``method="factorized"`` uses the same ``n * n_samples`` draws but
    exploits independence, E exp(t Z_n) = (E exp(t X))^n, so
    Lambda_hat(t) = log mean exp(t X) over all draws.
    """
    if n_samples < 100:
        raise LDPError("n_samples must be >= 100")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or not np.isfinite(t_grid).all():
        raise LDPError("t_grid must be finite and nonempty")
    gen = rng(seed, 0)
    draws = sampler.sample(gen, (n_samples, n)) if hasattr(sampler, "sample") else sampler(gen, (n_samples, n))
    lam = np.empty_like(t_grid)
    ok = np.ones(t_grid.size, dtype=bool)
    if method == "direct":
        z = draws.sum(axis=1)
        for i, t in enumerate(t_grid):
            lw = t * z
            lam[i] = (logsumexp(lw) - math.log(n_samples)) / n
            ok[i] = np.isfinite(lam[i]) and _ess_fraction(lw) >= min_ess
    elif method == "factorized":
        x = draws.ravel()
        for i, t in enumerate(t_grid):
            lw = t * x
            lam[i] = logsumexp(lw) - math.log(x.size)
            ok[i] = np.isfinite(lam[i]) and _ess_fraction(lw) >= min_ess
    else:
        raise LDPError(f"unknown method {method!r}")
    lam[t_grid == 0] = 0.0
    return SCGFEstimate(t_grid, lam, n, n_samples, method, ok)


def analytic_scgf(dist, t_grid) -> SCGFEstimate:
    t = np.asarray(t_grid, dtype=float)
    return SCGFEstimate(t, np.asarray(dist.scgf(t), float), 1, 0, "analytic", np.ones(t.size, bool))


@dataclass(frozen=True)
class RateFunction:
    x_grid: np.ndarray
    q_hat: np.ndarray
    boundary: np.ndarray
    t_star: np.ndarray


def legendre_transform(scgf: SCGFEstimate, x_grid) -> RateFunction:
    """Q_hat(x) = max over usable grid t of (x t - Lambda_hat(t)).

    ``boundary[i]`` is set when the maximizing t is an end of the usable
    grid, i.e. the true supremum may lie outside it.
    """
    use = scgf.reliable & np.isfinite(scgf.lambda_hat)
    if not use.any():
        raise LDPError("no usable SCGF grid points")
    t = scgf.t_grid[use]
    lam = scgf.lambda_hat[use]
    x = np.asarray(x_grid, dtype=float)
    vals = x[:, None] * t[None, :] - lam[None, :]
    j = vals.argmax(axis=1)
    q = vals[np.arange(x.size), j]
    boundary = (j == 0) | (j == t.size - 1)
    return RateFunction(x, q, boundary, t[j])


def legendre_inverse(rate: RateFunction, t_grid) -> np.ndarray:
    """Lambda(t) = max over x of (t x - Q(x)), for the involution check."""
    t = np.asarray(t_grid, dtype=float)
    return (t[:, None] * rate.x_grid[None, :] - rate.q_hat[None, :]).max(axis=1)


def ldp_decay_check(dist, x: float, n_list, n_samples: int, seed: int) -> list[dict]:
    """Empirical -n^-1 log P(mean >= x) for each n, with exact and asymptotic references."""
    rows = []
    for i, n in enumerate(n_list):
        gen = rng(seed, i)
        z = dist.sample_sum(gen, int(n), n_samples)
        if isinstance(dist, Bernoulli):
            hits = int((z >= math.ceil(n * x - 1e-9)).sum())
        else:
            hits = int((z >= n * x).sum())
        p_hat = hits / n_samples
        exact = dist.upper_tail(int(n), x)
        rows.append({
            "n": int(n),
            "events": hits,
            "p_hat": p_hat,
            "rate_hat": -math.log(p_hat) / n if hits else math.nan,
            "rate_exact": -math.log(exact) / n if exact > 0 else math.inf,
            "rate_limit": cramer_rate_upper(dist, x),
            "flagged": hits == 0,
        })
    return rows


# ---------------------------------------------------------------------------
# interacting diffusions


@dataclass(frozen=True)
class DiffusionSystem:
    """d eta_i = [sum_{j != i} f(eta_i - eta_j) + g(eta_i)] dt + d xi_i."""

    n_particles: int
    pair_force: Callable[[np.ndarray], np.ndarray] | None
    self_force: Callable[[np.ndarray], np.ndarray] | None
    dt: float
    horizon: float
    x0: np.ndarray | float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise LDPError("dt must be positive")
        if self.horizon < self.dt:
            raise LDPError("horizon must be at least one step")
        if self.n_particles < 1:
            raise LDPError("need at least one particle")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def start(self, n_paths: int) -> np.ndarray:
        x0 = np.broadcast_to(np.asarray(self.x0, float), (self.n_particles,))
        return np.tile(x0, (n_paths, 1))

    def drift(self, eta: np.ndarray) -> np.ndarray:
        """F_i for every path; ``eta`` has shape (paths, particles)."""
        out = np.zeros_like(eta)
        if self.pair_force is not None and self.n_particles > 1:
            diff = eta[:, :, None] - eta[:, None, :]
            f = self.pair_force(diff)
            idx = np.arange(self.n_particles)
            f[:, idx, idx] = 0.0
            out += f.sum(axis=2)
        if self.self_force is not None:
            out += self.self_force(eta)
        return out


@dataclass(frozen=True)
class DiffusionPaths:
    eta: np.ndarray          # (paths, particles, steps + 1)
    increments: np.ndarray   # (paths, particles, steps), the Brownian dxi
    interacting: bool


def simulate_diffusions(sys: DiffusionSystem, interacting: bool, n_paths: int, seed: int) -> DiffusionPaths:
    """Euler-Maruyama paths; with ``interacting=False`` the drift is dropped."""
    steps = sys.steps
    gen = rng(seed, 0)
    eta = np.empty((n_paths, sys.n_particles, steps + 1))
    eta[:, :, 0] = sys.start(n_paths)
    dxi = gen.normal(0.0, math.sqrt(sys.dt), (n_paths, sys.n_particles, steps))
    for k in range(steps):
        cur = eta[:, :, k]
        if interacting:
            f = sys.drift(cur)
            if not np.isfinite(f).all():
                raise DiffusionBlowup(k)
            eta[:, :, k + 1] = cur + f * sys.dt + dxi[:, :, k]
        else:
            eta[:, :, k + 1] = cur + dxi[:, :, k]
    return DiffusionPaths(eta, dxi, interacting)


@dataclass(frozen=True)
class Weights:
    weights: np.ndarray
    log_weights: np.ndarray
    ess_fraction: float
    degenerate: bool


def _normalize(logw: np.ndarray, ess_floor: float) -> Weights:
    w = np.exp(logw - logsumexp(logw)) * logw.size
    ess = float(w.sum() ** 2 / (w @ w) / w.size)
    return Weights(w, logw, ess, ess < ess_floor)


def girsanov_reweight(
    paths: DiffusionPaths, sys: DiffusionSystem, *, ess_floor: float = 0.05, sign: int = 1
) -> Weights:
    """Weights turning driftless reference paths into samples of the interacting law.

    log w = sum_i [ sign * int F_i d eta_i - 1/2 int F_i^2 dt ], Ito sums over
    the stored path.  ``sign=+1`` is the correct Radon-Nikodym exponent;
    ``sign=-1`` reproduces a sign-flipped variant for comparison.
    """
    if paths.interacting:
        raise LDPError("reweighting needs reference (non-interacting) paths")
    logw = np.zeros(paths.eta.shape[0])
    for k in range(paths.eta.shape[2] - 1):
        f = sys.drift(paths.eta[:, :, k])
        d = paths.eta[:, :, k + 1] - paths.eta[:, :, k]
        logw += (sign * f * d - 0.5 * f * f * sys.dt).sum(axis=1)
    return _normalize(logw, ess_floor)


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    n_paths: int
    ess_fraction: float = 1.0
    degenerate: bool = False


CHUNK = 10_000


def _stream(sys, interacting, n_paths, seed, observable, sign=1, workers=1):
    """Chunked Euler-Maruyama run returning per-path observable and log-weight.

    Chunk ``c`` draws from the stream derived from ``(seed, mode, c)`` with a fixed
    chunk size, so results do not depend on memory limits or worker count.
    """

    def chunk(c: int):
        lo = c * CHUNK
        size = min(CHUNK, n_paths - lo)
        gen = rng(seed, 1 if interacting else 2, c)
        eta = sys.start(size)
        logw = np.zeros(size)
        for k in range(sys.steps):
            dxi = gen.normal(0.0, math.sqrt(sys.dt), eta.shape)
            f = sys.drift(eta)
            if not np.isfinite(f).all():
                raise DiffusionBlowup(k)
            if interacting:
                eta = eta + f * sys.dt + dxi
            else:
                logw += (sign * f * dxi - 0.5 * f * f * sys.dt).sum(axis=1)
                eta = eta + dxi
        return observable(eta), logw

    parts = parallel_map(chunk, range(-(-n_paths // CHUNK)), workers)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def direct_moment(sys: DiffusionSystem, observable, n_paths: int, seed: int, *, workers: int = 1) -> MomentEstimate:
    """Plain Monte Carlo mean of ``observable(eta_T)`` under the interacting dynamics."""
    y, _ = _stream(sys, True, n_paths, seed, observable, workers=workers)
    return MomentEstimate(float(y.mean()), float(y.std(ddof=1) / math.sqrt(n_paths)), n_paths)


def reweighted_moment(
    sys: DiffusionSystem, observable, n_paths: int, seed: int, *,
    sign: int = 1, ess_floor: float = 0.05, workers: int = 1,
) -> MomentEstimate:
    """Self-normalized Girsanov estimate of the same mean from driftless paths."""
    y, logw = _stream(sys, False, n_paths, seed, observable, sign, workers)
    w = _normalize(logw, ess_floor)
    mean = float(np.mean(w.weights * y))
    # delta-method standard error of the self-normalized estimator
    se = float(np.sqrt(np.mean((w.weights * (y - mean)) ** 2) / n_paths))
    return MomentEstimate(mean, se, n_paths, w.ess_fraction, w.degenerate)


def ou_second_moment(x0: float, t: float, theta: float = 1.0) -> float:
    """E[eta_t^2] for d eta = -theta eta dt + dW started at x0."""
    return x0 ** 2 * math.exp(-2 * theta * t) + (1 - math.exp(-2 * theta * t)) / (2 * theta)


def pair_gap_second_moment(gap0: float, t: float, a: float = 0.5) -> float:
    """E[(eta_1 - eta_2)^2] for two particles with pair force f(d) = -a d and no self force.

    The gap is an OU process with rate 2a and noise variance 2.
    """
    decay = math.exp(-4 * a * t)
    return gap0 ** 2 * decay + (1 - decay) / (2 * a)
