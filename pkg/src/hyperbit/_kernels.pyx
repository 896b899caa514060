# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_fallback.py``; results are bit-identical."""

from libc.math cimport fabs
from libc.stdint cimport int64_t, uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0
cdef uint64_t STREAMS = 4


cdef inline double _uniform(uint64_t key, uint64_t sample, uint64_t stream) nogil:
    cdef uint64_t z = key + (sample * STREAMS + stream + 1) * GAMMA
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    z = z ^ (z >> 31)
    return <double>(z >> 11) * INV_2_53


cdef inline double _raw(double z, uint64_t key, uint64_t i, bint fair) nogil:
    cdef double r = 1.0
    if fair:
        r = 1.0 if _uniform(key, i, 0) < 0.5 else -1.0
    cdef double p_plus = 0.5 * (1.0 + r * z)
    cdef double s = 1.0 if _uniform(key, i, 1) < p_plus else -1.0
    return r * s


def mc_weights(double z, double c1, double c2, double c3, int64_t n,
               uint64_t key, bint fair, int64_t start=0):
    cdef int64_t total = 0
    cdef uint64_t i
    cdef double s, u
    with nogil:
        for i in range(<uint64_t>start, <uint64_t>(start + n)):
            s = _raw(z, key, i, fair)
            u = _uniform(key, i, 2)
            if u < c1:
                total += 1
            elif u < c2:
                total -= 1
            elif u < c3:
                total += <int64_t>s
            else:
                total -= <int64_t>s
    return total


def mc_pw(double z, double p_discard, int sign, double q, int64_t n,
          uint64_t key, bint fair, int64_t start=0):
    cdef int64_t total = 0
    cdef uint64_t i
    cdef double s
    cdef bint discard, flip
    with nogil:
        for i in range(<uint64_t>start, <uint64_t>(start + n)):
            s = _raw(z, key, i, fair)
            discard = _uniform(key, i, 2) < p_discard
            flip = _uniform(key, i, 3) < q
            if discard:
                total += sign
            elif flip:
                total -= <int64_t>s
            else:
                total += <int64_t>s
    return total


def gap_grid(double x, double y, double zlo, double zhi, int steps):
    cdef double best = float("inf"), best_i = 0.0, best_s = 0.0
    cdef double i, s, a, b, v1, v2, val, room
    cdef int p, r
    cdef double step = 2.0 / steps
    import numpy as np
    cdef double[:] grid = np.linspace(-1.0, 1.0, steps + 1)
    with nogil:
        for p in range(steps + 1):
            i = grid[p]
            room = 1.0 - fabs(i)
            a = y - i
            for r in range(steps + 1):
                s = grid[r]
                if fabs(s) > room + 1e-12:
                    continue
                b = x - s
                v1 = fabs(a + b * zlo)
                v2 = fabs(a + b * zhi)
                val = v1 if v1 >= v2 else v2
                if val < best:
                    best = val
                    best_i = i
                    best_s = s
    return best, best_i, best_s


def simplex_grid_search(double x, double y, int n, double tol):
    cdef double h = 1.0 / n
    cdef int m1, m2, m3, rest
    cdef double ry
    for m1 in range(n + 1):
        for m2 in range(n + 1 - m1):
            ry = fabs((m1 - m2) * h - y)
            if ry > tol:
                continue
            rest = n - m1 - m2
            for m3 in range(rest + 1):
                if ry + fabs((2 * m3 - rest) * h - x) <= tol:
                    return True, m1, m2, m3, rest - m3
    return False, -1, -1, -1, -1
