"""Derived seeds and a counter-based hash RNG.

Every stochastic routine draws from streams keyed by ``(master seed, index...)``
so results do not depend on how work is split between workers or batches.
"""
from __future__ import annotations

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def derive_seed(master: int, *keys: int) -> int:
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def rng(master: int, *keys: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master, *keys)))


def splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def hash_uniform(keys: np.ndarray, counter: int) -> np.ndarray:
    """Uniform [0, 1) doubles, one per key, for the given step counter.

    Output ``counter`` of the SplitMix64 stream started at each key: a pure
    function of (key, counter), so walker ``i`` sees the same numbers whether
    it is simulated alone or inside a large batch.
    """
    with np.errstate(over="ignore"):
        z = splitmix64(keys + np.uint64(counter) * np.uint64(0x9E3779B97F4A7C15))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def parallel_map(fn, items, workers: int = 1) -> list:
    """Ordered ``[fn(x) for x in items]``, on a thread pool when ``workers > 1``.

    Each task must draw only from its own derived stream; the output is then
    identical for any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))
