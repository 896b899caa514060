"""Pure numpy implementations of the hot kernels.

Each function matches its compiled twin in ``_kernels.pyx`` bit for bit.
"""

from __future__ import annotations

import numpy as np

from .rng import (
    STREAM_FLIP,
    STREAM_OUTCOME,
    STREAM_SHARED_BIT,
    STREAM_STRATEGY,
    uniforms,
)

CHUNK = 1 << 20


def _raw_outcomes(z, idx, key, fair):
    """Decoded +-1 outcomes with mean ``z`` for sample indices ``idx``."""
    if fair:
        r = np.where(uniforms(key, idx, STREAM_SHARED_BIT) < 0.5, 1.0, -1.0)
    else:
        r = np.ones(idx.shape[0])
    p_plus = 0.5 * (1.0 + r * z)
    s = np.where(uniforms(key, idx, STREAM_OUTCOME) < p_plus, 1.0, -1.0)
    return r * s


def mc_weights(z, c1, c2, c3, n, key, fair, start=0):
    """Sum of strategy outputs over samples ``start .. start+n-1``."""
    total = 0
    for lo in range(start, start + n, CHUNK):
        idx = np.arange(lo, min(lo + CHUNK, start + n), dtype=np.uint64)
        s = _raw_outcomes(z, idx, key, fair)
        u = uniforms(key, idx, STREAM_STRATEGY)
        out = np.where(u < c1, 1.0, np.where(u < c2, -1.0, np.where(u < c3, s, -s)))
        total += int(np.rint(out).astype(np.int64).sum())
    return total


def mc_pw(z, p_discard, sign, q, n, key, fair, start=0):
    """Sum of discard-then-flip outputs over samples ``start .. start+n-1``."""
    total = 0
    for lo in range(start, start + n, CHUNK):
        idx = np.arange(lo, min(lo + CHUNK, start + n), dtype=np.uint64)
        s = _raw_outcomes(z, idx, key, fair)
        discard = uniforms(key, idx, STREAM_STRATEGY) < p_discard
        flip = uniforms(key, idx, STREAM_FLIP) < q
        out = np.where(discard, float(sign), np.where(flip, -s, s))
        total += int(np.rint(out).astype(np.int64).sum())
    return total


def gap_grid(x, y, zlo, zhi, steps):
    """Brute-force ``min max |t - g|`` over an (i, s) lattice of the l1 ball.

    Returns ``(best, i, s)``. The lattice has spacing ``2 / steps`` per axis.
    """
    grid = np.linspace(-1.0, 1.0, steps + 1)
    best, best_i, best_s = np.inf, 0.0, 0.0
    for i in grid:
        room = 1.0 - abs(i)
        s = grid[np.abs(grid) <= room + 1e-12]
        a = y - i
        b = x - s
        val = np.maximum(np.abs(a + b * zlo), np.abs(a + b * zhi))
        j = int(np.argmin(val))
        if val[j] < best:
            best, best_i, best_s = float(val[j]), float(i), float(s[j])
    return best, best_i, best_s


def simplex_grid_search(x, y, n, tol):
    """Scan the simplex lattice ``k = m / n`` for weights matching ``(x, y)``.

    A lattice point matches when ``|k1-k2-y| + |k3-k4-x| <= tol``. Returns
    ``(found, m1, m2, m3, m4)`` for the first match in lexicographic order, or
    ``(False, -1, -1, -1, -1)``.
    """
    h = 1.0 / n
    m3 = np.arange(n + 1)
    for m1 in range(n + 1):
        for m2 in range(n + 1 - m1):
            ry = abs((m1 - m2) * h - y)
            if ry > tol:
                continue
            rest = n - m1 - m2
            cand = m3[: rest + 1]
            resid = ry + np.abs((2 * cand - rest) * h - x)
            hit = np.flatnonzero(resid <= tol)
            if hit.size:
                k3 = int(cand[hit[0]])
                return True, m1, m2, k3, rest - k3
    return False, -1, -1, -1, -1
