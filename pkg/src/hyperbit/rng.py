"""Counter-based random numbers.

Sample ``i`` of stream ``j`` draws ``mix(key + (STREAMS*i + j + 1) * GAMMA)``,
the SplitMix64 output at that position. Any sample can be regenerated from
``(seed, i)`` alone, so batches may run in any order or in parallel.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
STREAMS = 4  # per-sample draws: shared bit, outcome, strategy, flip coin
STREAM_SHARED_BIT, STREAM_OUTCOME, STREAM_STRATEGY, STREAM_FLIP = range(STREAMS)
INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int) -> int:
    """Scramble a user seed (any Python int) into a 64-bit stream key."""
    return mix64((int(seed) & MASK64) + GAMMA)


def uniform(key: int, sample: int, stream: int) -> float:
    """Scalar reference implementation of one draw in [0, 1)."""
    counter = STREAMS * sample + stream + 1
    return (mix64(key + counter * GAMMA) >> 11) * INV_2_53


def uniforms(key: int, samples: np.ndarray, stream: int) -> np.ndarray:
    """Vectorized draws in [0, 1) for an array of sample indices."""
    counters = samples.astype(np.uint64) * np.uint64(STREAMS) + np.uint64(stream + 1)
    z = np.uint64(key) + counters * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53
