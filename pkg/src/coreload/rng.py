"""Deterministic counter-based random streams.

Every stochastic component draws from a Philox generator keyed by
(seed, stream index), so restart r of a solve always sees the same numbers
no matter how many worker threads run or in what order restarts finish.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Stream index reserved for per-solve setup draws (e.g. spectral probes);
# restart indices stay well below it.
SETUP_STREAM = MASK64


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for a (seed, stream index) pair."""
    key = ((index & MASK64) << 64) | (seed & MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold structured indices (e.g. grid coordinates) into a 64-bit sub-seed."""
    acc = 0
    for p in parts:
        acc = _splitmix64(acc ^ (p & MASK64))
    return acc
