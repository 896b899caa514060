"""Geometry of the target ``t = y + x z``: regions C and D, strategies, gaps.

C is the set of triples reachable by entanglement plus one bit::

    x^2 + y^2 <= 1,  |y + x z| <= 1,  |z| <= 1

D is the parallelepiped ``|x| + |y| <= 1, |z| <= 1`` where a strategy fixed
before the hyperbit arrives can still reproduce ``t`` for every ``z``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import config
from .errors import EmptyInterval, Infeasible
from .protocol import StrategyWeights, pw_q


@dataclass(frozen=True)
class RegionPoint:
    x: float
    y: float
    z: float

    @property
    def t(self) -> float:
        return target_t(self)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


class RegionLabel(enum.Enum):
    INSIDE_D = "InsideD"
    IN_C_NOT_D = "InCNotD"
    OUTSIDE_C = "OutsideC"


def target_t(p: RegionPoint) -> float:
    return p.y + p.x * p.z


def in_C(p: RegionPoint, tol: float = config.REGION_TOL) -> bool:
    return (
        p.x * p.x + p.y * p.y <= 1 + tol
        and abs(target_t(p)) <= 1 + tol
        and abs(p.z) <= 1 + tol
    )


def in_D(p: RegionPoint, tol: float = config.REGION_TOL) -> bool:
    return abs(p.z) <= 1 + tol and abs(p.x) + abs(p.y) <= 1 + tol


def classify(p: RegionPoint, tol: float = config.REGION_TOL) -> RegionLabel:
    c = in_C(p, tol)
    d = in_D(p, tol)
    if d and not c:
        # D lies inside C for every tolerance; reaching this is a bug.
        raise AssertionError(f"point {p} in D but not in C")
    if d:
        return RegionLabel.INSIDE_D
    return RegionLabel.IN_C_NOT_D if c else RegionLabel.OUTSIDE_C


def weights_for(x: float, y: float, tol: float = config.REGION_TOL) -> StrategyWeights:
    """The z-independent strategy with ``k1-k2 = y`` and ``k3-k4 = x``.

    Exists iff ``|x| + |y| <= 1``; otherwise :class:`Infeasible` carries
    ``|x| + |y| - 1``.
    """
    return StrategyWeights.from_differences(y, x, tol)


def z_aware_weights(x: float, y: float, z: float,
                    tol: float = config.REGION_TOL) -> StrategyWeights:
    """A strategy chosen knowing ``z`` with ``g(k, z) = y + x z``.

    Among solutions, the slope ``k3 - k4`` is taken as close to ``x`` as the
    simplex allows, so points of D get :func:`weights_for` unchanged.
    """
    if abs(z) > 1 + tol:
        raise ValueError(f"|z| must be at most 1, got {z!r}")
    z = min(max(z, -1.0), 1.0)
    t = y + x * z
    if abs(t) > 1 + tol:
        raise Infeasible(abs(t) - 1)
    if abs(t) > 1:
        return StrategyWeights.from_differences(math.copysign(1.0, t), 0.0)
    # Feasible slopes s satisfy |t - s z| + |s| <= 1; expanding the four sign
    # cases gives one interval, which always contains s = 0.
    lo, hi = -math.inf, math.inf
    if z < 1:
        hi = min(hi, (1 - t) / (1 - z))
        lo = max(lo, -(1 + t) / (1 - z))
    if z > -1:
        hi = min(hi, (1 + t) / (1 + z))
        lo = max(lo, -(1 - t) / (1 + z))
    slope = min(max(x, lo), hi)
    bias = t - slope * z
    return StrategyWeights.from_differences(bias, slope, tol)


def z_from_weights(k: StrategyWeights, x: float, y: float) -> float:
    """Solve ``k1 - k2 - y + (k3 - k4 - x) z = 0`` for ``z``."""
    denom = k.slope - x
    if denom == 0:
        raise ZeroDivisionError("slope equals x; z is not determined by the weights")
    return (y - k.discard_bias) / denom


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def admissible_z_interval(x: float, y: float,
                          tol: float = config.REGION_TOL) -> Interval:
    """``{z : |z| <= 1, |y + x z| <= 1}`` for fixed ``(x, y)``."""
    lo, hi = -1.0, 1.0
    if x > 0:
        lo, hi = max(lo, (-1 - y) / x), min(hi, (1 - y) / x)
    elif x < 0:
        lo, hi = max(lo, (1 - y) / x), min(hi, (-1 - y) / x)
    elif abs(y) > 1 + tol:
        raise EmptyInterval(f"|y| = {abs(y)!r} > 1 with x = 0")
    if lo > hi + tol:
        raise EmptyInterval(f"no admissible z for (x, y) = ({x!r}, {y!r})")
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
    return Interval(lo, hi)


@dataclass(frozen=True)
class GapReport:
    point_xy: tuple[float, float]
    admissible_z: Interval
    best_weights: StrategyWeights
    worst_z: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "x": self.point_xy[0],
            "y": self.point_xy[1],
            "admissible_z": [self.admissible_z.lo, self.admissible_z.hi],
            "best_weights": list(self.best_weights.as_tuple()),
            "worst_z": self.worst_z,
            "gap": self.gap,
        }


def _worst_error(x, y, bias, slope, zlo, zhi) -> float:
    a, b = y - bias, x - slope
    return max(abs(a + b * zlo), abs(a + b * zhi))


def _gap_candidates(x, y, zlo, zhi) -> Iterable[tuple[float, float]]:
    """Vertices of the arrangement where the piecewise-linear objective can be minimal.

    The objective ``max_z |y - i + (x - s) z|`` equals
    ``|y - i + (x - s) zm| + h |x - s|`` with ``zm`` the interval midpoint
    and ``h`` its half-width. It is linear away from the lines
    ``i + s zm = y + x zm`` and ``s = x``; its minimum over the l1 ball
    ``|i| + |s| <= 1`` therefore sits on a ball vertex, on a crossing of a kink
    line with a ball edge, or on the crossing of the two kink lines.
    """
    zm = 0.5 * (zlo + zhi)
    c = y + x * zm
    yield from ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))
    # Crossing of the two kink lines.
    yield (c - x * zm, x)
    # Each ball edge: i = e1 * (1 - u), s = e2 * u for u in [0, 1].
    for e1 in (1.0, -1.0):
        for e2 in (1.0, -1.0):
            # s = x on the edge.
            if e2 * x >= 0 and abs(x) <= 1:
                u = abs(x)
                yield (e1 * (1 - u), e2 * u)
            # e1 (1 - u) + e2 u zm = c
            denom = e2 * zm - e1
            if denom != 0:
                u = (c - e1) / denom
                if 0.0 <= u <= 1.0:
                    yield (e1 * (1 - u), e2 * u)


def minimax_gap(x: float, y: float, tol: float = config.REGION_TOL) -> GapReport:
    """Smallest worst-case error of any z-independent strategy at ``(x, y)``.

    ``gap = min_k max_{z admissible} |t(x, y, z) - g(k, z)|``. Both ``t`` and
    ``g`` are affine in ``z``, so the inner maximum is taken at the interval
    endpoints, and the outer minimum runs over ``(k1 - k2, k3 - k4)`` in the
    l1 ball.
    """
    iv = admissible_z_interval(x, y, tol)
    best = (math.inf, 0.0, 0.0)
    for bias, slope in _gap_candidates(x, y, iv.lo, iv.hi):
        if abs(bias) + abs(slope) > 1 + 1e-12:
            continue
        err = _worst_error(x, y, bias, slope, iv.lo, iv.hi)
        if err < best[0]:
            best = (err, bias, slope)
    gap, bias, slope = best
    if abs(x) + abs(y) <= 1 + tol:
        # Exact reproduction is available; report it without rounding noise.
        gap, bias, slope = 0.0, y, x
    weights = StrategyWeights.from_differences(bias, slope, tol)
    a, b = y - bias, x - slope
    worst_z = iv.lo if abs(a + b * iv.lo) >= abs(a + b * iv.hi) else iv.hi
    return GapReport((x, y), iv, weights, worst_z, gap)


def gap_oracle(x: float, y: float, steps: int = 2000,
               tol: float = config.REGION_TOL) -> float:
    """Brute-force lattice estimate of :func:`minimax_gap` (independent check)."""
    from . import kernels

    iv = admissible_z_interval(x, y, tol)
    return kernels.gap_grid(x, y, iv.lo, iv.hi, steps)[0]


def feasible_by_grid(x: float, y: float, resolution: float = 1e-3,
                     match_tol: float | None = None) -> bool:
    """Brute-force check for weights on the simplex lattice of spacing ``resolution``.

    The lattice only approximates the equality constraints, so a lattice point
    matches when ``|k1-k2-y| + |k3-k4-x| <= match_tol``. The default of one
    lattice step is the smallest that finds every feasible ``(x, y)``:
    truncating both targets toward zero and fixing the parity of ``m1+m2`` costs
    at most one step in total. Points infeasible by less than one step are
    reported feasible.
    """
    from . import kernels

    n = int(round(1.0 / resolution))
    h = 1.0 / n
    tol = h * (1 + 1e-9) if match_tol is None else match_tol
    return bool(kernels.simplex_grid_search(x, y, n, tol)[0])


def helix_point(tau: float, branch: int) -> RegionPoint:
    """Point ``(cos tau, +-sin tau, +-(1 - sin tau) / cos tau)`` on the cylinder."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if not 0.0 <= tau <= math.pi:
        raise ValueError(f"tau must lie in [0, pi], got {tau!r}")
    c, s = math.cos(tau), math.sin(tau)
    ratio = 0.0 if abs(c) < 1e-8 else (1.0 - s) / c
    return RegionPoint(c, branch * s, branch * ratio)


def helix(steps: int) -> list[tuple[float, int, RegionPoint]]:
    """``steps`` evenly spaced values of tau on each branch."""
    if steps < 2:
        raise ValueError("need at least two steps")
    taus = np.linspace(0.0, math.pi, steps)
    return [(float(t), b, helix_point(float(t), b)) for b in (1, -1) for t in taus]


HELIX_CSV_HEADER = ["tau", "branch", "x", "y", "z", "t"]
SCAN_CSV_HEADER = ["x", "y", "z", "t", "in_C", "in_D", "q", "q_valid", "gap"]


@dataclass(frozen=True)
class ScanRow:
    point: RegionPoint
    label: RegionLabel
    q: float | None
    q_valid: bool | None
    gap: float | None

    def csv_fields(self) -> list:
        p = self.point
        return [
            repr(p.x), repr(p.y), repr(p.z), repr(target_t(p)),
            int(self.label is not RegionLabel.OUTSIDE_C),
            int(self.label is RegionLabel.INSIDE_D),
            "" if self.q is None else repr(self.q),
            "" if self.q_valid is None else int(self.q_valid),
            "" if self.gap is None else repr(self.gap),
        ]


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    counts: dict[str, int]
    volume_fraction: float
    volume_samples: int
    seed: int

    def summary(self) -> dict:
        return {
            "counts": dict(self.counts),
            "points": len(self.rows),
            "volume_fraction_D_over_C": self.volume_fraction,
            "volume_samples": self.volume_samples,
            "seed": self.seed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_CSV_HEADER)
        for row in self.rows:
            w.writerow(row.csv_fields())
        return buf.getvalue()


def volume_fraction(samples: int, seed: int, tol: float = config.REGION_TOL) -> float:
    """Monte Carlo estimate of vol(D) / vol(C) from uniform draws in [-1, 1]^3."""
    from .rng import derive_key, uniforms

    key = derive_key(seed)
    idx = np.arange(samples, dtype=np.uint64)
    x, y, z = (2.0 * uniforms(key, idx, j) - 1.0 for j in range(3))
    c = (x * x + y * y <= 1 + tol) & (np.abs(y + x * z) <= 1 + tol) & (np.abs(z) <= 1 + tol)
    d = (np.abs(x) + np.abs(y) <= 1 + tol) & (np.abs(z) <= 1 + tol)
    n_c = int(c.sum())
    return int((d & c).sum()) / n_c if n_c else math.nan


def _axis(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("grid resolutions must be positive")
    return np.array([0.0]) if n == 1 else np.linspace(-1.0, 1.0, n)


def scan_region(nx: int, ny: int, nz: int, *, with_gap: bool = False,
                volume_samples: int = 200_000, seed: int = 0,
                tol: float = config.REGION_TOL) -> ScanResult:
    """Label every point of an ``nx x ny x nz`` grid over [-1, 1]^3."""
    rows: list[ScanRow] = []
    counts = {label.value: 0 for label in RegionLabel}
    gaps: dict[tuple[float, float], float | None] = {}
    for x in _axis(nx):
        for y in _axis(ny):
            x, y = float(x), float(y)
            q = valid = None
            if abs(y) < 1:
                fq = pw_q(x, y, tol)
                q, valid = fq.value, fq.valid
            if with_gap:
                gaps[(x, y)] = (
                    minimax_gap(x, y, tol).gap if x * x + y * y <= 1 + tol else None
                )
            for z in _axis(nz):
                p = RegionPoint(x, y, float(z))
                label = classify(p, tol)
                counts[label.value] += 1
                rows.append(ScanRow(p, label, q, valid, gaps.get((x, y))))
    frac = volume_fraction(volume_samples, seed, tol) if volume_samples else math.nan
    return ScanResult(rows, counts, frac, volume_samples, seed)
