"""Birkhoff averages along measure-preserving maps of [0, 1).

The rotation is evaluated in closed form, x_k = x0 + k*alpha mod 1, with
alpha split into a 26-bit head (so k*head is exact for k < 2**27) and a
small tail.  The doubling map is run on an explicit bit string: x_k is read
off bits k..k+52 of the binary expansion of x0, which is what 2^k x0 mod 1
means, instead of repeatedly doubling a float (that collapses to 0 within
about 53 steps).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from ._seeding import parallel_map, rng


class ErgodicError(ValueError):
    pass


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True)
class Rotation:
    alpha: float

    @property
    def _split(self) -> tuple[float, float]:
        a = self.alpha % 1.0
        hi = math.floor(a * 2 ** 26) / 2 ** 26
        return hi, a - hi

    def step(self, x: np.ndarray) -> np.ndarray:
        return (x + self.alpha) % 1.0

    def orbit(self, x0: float, n: int) -> np.ndarray:
        """x_1 .. x_n."""
        hi, lo = self._split
        k = np.arange(1, n + 1, dtype=np.float64)
        a = (k * hi) % 1.0     # exact
        return (x0 + a + k * lo) % 1.0


@dataclass(frozen=True)
class BitPoint:
    """A point of [0, 1) given by its leading binary digits, packed big-endian in uint64 words."""

    words: np.ndarray

    @property
    def value(self) -> float:
        return float(self.words[0] >> np.uint64(11)) * 2.0 ** -53


class Doubling:
    def step(self, x: np.ndarray) -> np.ndarray:
        return (2.0 * x) % 1.0

    @staticmethod
    def random_point(gen: np.random.Generator, n: int) -> BitPoint:
        """Enough random bits for n doublings plus a full mantissa."""
        count = (n + 53) // 64 + 2
        return BitPoint(gen.integers(0, 2 ** 64, count, dtype=np.uint64, endpoint=False))

    @staticmethod
    def point_from_float(x0: float, n: int) -> BitPoint:
        """Exact expansion of a float; the tail is zero, as it truly is for a dyadic rational."""
        if not 0.0 <= x0 < 1.0:
            raise ErgodicError("start point must lie in [0, 1)")
        count = (n + 53) // 64 + 2
        num, den = x0.as_integer_ratio()
        shift = 64 * count - (den.bit_length() - 1)
        big = num << shift if shift >= 0 else num >> -shift
        words = [(big >> (64 * (count - 1 - i))) & (2 ** 64 - 1) for i in range(count)]
        return BitPoint(np.array(words, dtype=np.uint64))

    def orbit(self, x0, n: int) -> np.ndarray:
        """x_1 .. x_n, each the 53 bits starting at offset k."""
        if not isinstance(x0, BitPoint):
            x0 = self.point_from_float(float(x0), n)
        w = x0.words
        q_count = (n + 1) // 64 + 1
        if w.size < q_count + 1:
            raise ErgodicError("bit point too short for the requested orbit")
        cur = w[:q_count, None]
        nxt = w[1:q_count + 1, None]
        r = np.arange(64, dtype=np.uint64)[None, :]
        with np.errstate(over="ignore"):
            hi = cur << r
            carry = np.where(r == 0, np.uint64(0), nxt >> (np.uint64(64) - np.maximum(r, np.uint64(1))))
        window = (hi | carry).ravel()[1:n + 1]
        return (window >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


class Squaring:
    """x -> x^2, which does not preserve Lebesgue measure (negative control)."""

    def step(self, x: np.ndarray) -> np.ndarray:
        return x * x


def make_map(name: str, alpha: float | None = None):
    if name == "rotation":
        return Rotation((math.sqrt(5) - 1) / 2 if alpha is None else alpha)
    if name == "doubling":
        return Doubling()
    if name == "square":
        return Squaring()
    raise ErgodicError(f"unknown map {name!r}")


# ---------------------------------------------------------------------------
# observables


@dataclass(frozen=True)
class Observable:
    fn: Callable[[np.ndarray], np.ndarray]
    mean: float
    name: str = ""
    constant: float | None = None


def observable(name: str, c: float = 1.0) -> Observable:
    if name == "x":
        return Observable(lambda x: x, 0.5, "x")
    if name == "sin":
        return Observable(lambda x: np.sin(2 * np.pi * x), 0.0, "sin")
    if name == "const":
        return Observable(lambda x: np.full_like(x, c), c, "const", c)
    raise ErgodicError(f"unknown observable {name!r}")


def _as_observable(h) -> Observable:
    if isinstance(h, Observable):
        return h
    if isinstance(h, str):
        return observable(h)
    return Observable(h, math.nan)


def _running_means(sys, h: Observable, x0, n_grid) -> np.ndarray:
    n_grid = np.asarray(n_grid, dtype=np.int64)
    if h.constant is not None:
        return np.full(n_grid.size, float(h.constant))
    s = np.cumsum(h.fn(sys.orbit(x0, int(n_grid.max()))))
    return s[n_grid - 1] / n_grid


def birkhoff_average(sys, h, x0, n: int) -> float:
    """(1/n) * sum_{k=1..n} h(T^k x0)."""
    if n < 1:
        raise ErgodicError("n must be >= 1")
    return float(_running_means(sys, _as_observable(h), x0, [n])[0])


def random_start(sys, gen: np.random.Generator, n: int):
    if isinstance(sys, Doubling):
        return sys.random_point(gen, n)
    return float(gen.random())


@dataclass(frozen=True)
class ConvergenceCurve:
    n_grid: np.ndarray
    l2_error: np.ndarray
    fitted_exponent: float
    exponent_ci: tuple[float, float]
    flagged: bool
    max_deviation: np.ndarray


def l2_error_curve(sys, h, n_grid, n_points: int, seed: int, *, workers: int = 1) -> ConvergenceCurve:
    """Root-mean-square Birkhoff error over ``n_points`` uniform starts, with a log-log fit.

    Start ``i`` uses the stream derived from ``(seed, i)``.  ``exponent_ci``
    is a 95% interval from the regression standard error.
    """
    h = _as_observable(h)
    if not math.isfinite(h.mean):
        raise ErgodicError("l2_error_curve needs an observable with a known mean")
    n_grid = np.asarray(n_grid, dtype=np.int64)
    if n_grid.size == 0 or (np.diff(n_grid) <= 0).any() or n_grid[0] < 1:
        raise ErgodicError("n_grid must be positive and strictly increasing")
    if n_points < 100:
        raise ErgodicError("n_points must be >= 100")
    nmax = int(n_grid[-1])

    def one(i: int) -> np.ndarray:
        x0 = random_start(sys, rng(seed, i), nmax)
        return _running_means(sys, h, x0, n_grid) - h.mean

    dev = np.array(parallel_map(one, range(n_points), workers))
    err = np.sqrt((dev ** 2).mean(axis=0))
    maxdev = np.abs(dev).max(axis=0)
    if (err <= 0).any() or n_grid.size < 3:
        return ConvergenceCurve(n_grid, err, math.nan, (math.nan, math.nan), True, maxdev)
    fit = stats.linregress(np.log(n_grid), np.log(err))
    half = stats.t.ppf(0.975, n_grid.size - 2) * fit.stderr
    return ConvergenceCurve(n_grid, err, float(fit.slope),
                            (float(fit.slope - half), float(fit.slope + half)), False, maxdev)


@dataclass(frozen=True)
class UniformityTest:
    statistic: float
    p_value: float
    bins: int


def invariance_check(sys, n_samples: int, seed: int, bins: int = 64) -> UniformityTest:
    """Chi-square test that T pushes Lebesgue-uniform samples to uniform."""
    if n_samples < 10_000:
        raise ErgodicError("n_samples must be >= 10^4")
    x = rng(seed, 0).random(n_samples)
    y = sys.step(x)
    counts = np.bincount(np.minimum((y * bins).astype(np.int64), bins - 1), minlength=bins)
    res = stats.chisquare(counts)
    return UniformityTest(float(res.statistic), float(res.pvalue), bins)
