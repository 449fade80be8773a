"""SplitMix64 mixing and counter-based uniform streams.

Every random quantity in the package is derived from a 64-bit seed through
``splitmix64``.  Edge weights are counter-based: the weight of edge number
``e`` depends only on ``(seed, e)``, so any single weight can be recomputed
without touching the others.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """One SplitMix64 output for state ``x`` (scalar, exact integer arithmetic)."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _C1) & MASK64
    z = ((z ^ (z >> 27)) * _C2) & MASK64
    return z ^ (z >> 31)


def mix(*parts: int) -> int:
    """Fold integers into a single 64-bit seed.

    ``mix(a, b, c)`` is ``splitmix64(splitmix64(splitmix64(a) ^ b) ^ c)``;
    negative inputs are reduced mod 2**64.
    """
    if not parts:
        raise ValueError("mix() needs at least one part")
    h = splitmix64(parts[0] & MASK64)
    for p in parts[1:]:
        h = splitmix64(h ^ (p & MASK64))
    return h


def _splitmix64_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(key: int, counters: np.ndarray) -> np.ndarray:
    """Uniforms in the open interval (0, 1) for each counter under ``key``.

    ``u = (top53(splitmix64(key ^ splitmix64(counter))) + 0.5) / 2**53``;
    never exactly 0 or 1, so ``-log(u)`` is finite.
    """
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _splitmix64_array(np.uint64(key & MASK64) ^ _splitmix64_array(c))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def generator(*parts: int) -> np.random.Generator:
    """A numpy Generator seeded from ``mix(*parts)``."""
    return np.random.Generator(np.random.PCG64(mix(*parts)))
