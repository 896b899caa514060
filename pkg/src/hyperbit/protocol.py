"""Hyperbit side: raw expectations, post-processing strategies, and simulation.

Bob's raw outcome ``s`` has expectation ``z``. A strategy mixes the four
deterministic maps ``f1 = +1``, ``f2 = -1``, ``f3 = s``, ``f4 = -s`` with
weights ``k``, giving ``g = k1 - k2 + (k3 - k4) z``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Union

import numpy as np

from . import config, kernels
from .errors import (
    DegenerateDiscard,
    ExpectationOutOfRange,
    Infeasible,
    InvalidFlipProbability,
    NormViolation,
)
from .rng import derive_key

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Hyperbit:
    """A vector in the unit hyperball."""

    vector: np.ndarray
    tol: float = config.MATRIX_TOL

    def __post_init__(self):
        v = np.array(self.vector, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        if np.linalg.norm(v) > 1 + self.tol:
            raise NormViolation(f"hyperbit has norm {np.linalg.norm(v):.12g} > 1")

    def __neg__(self) -> "Hyperbit":
        return Hyperbit(-self.vector, self.tol)


@dataclass(frozen=True)
class SharedRandomBit:
    value: int
    source_seed: int


def shared_random_bits(seed: int, count: int) -> list[SharedRandomBit]:
    """Fair +-1 bits copied to both parties, one per sample index."""
    from .rng import STREAM_SHARED_BIT, uniforms

    u = uniforms(derive_key(seed), np.arange(count, dtype=np.uint64), STREAM_SHARED_BIT)
    return [SharedRandomBit(1 if v < 0.5 else -1, seed) for v in u]


@dataclass(frozen=True)
class StrategyWeights:
    """Point of the post-processing tetrahedron."""

    k1: float
    k2: float
    k3: float
    k4: float

    def __post_init__(self):
        ks = self.as_tuple()
        if any(not math.isfinite(k) for k in ks):
            raise ValueError(f"weights must be finite, got {ks}")
        if min(ks) < -WEIGHT_TOL:
            raise ValueError(f"weights must be non-negative, got {ks}")
        if abs(math.fsum(ks) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {math.fsum(ks)!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.k1, self.k2, self.k3, self.k4)

    @property
    def discard_bias(self) -> float:
        """``k1 - k2``: the z-independent part of the output expectation."""
        return self.k1 - self.k2

    @property
    def slope(self) -> float:
        """``k3 - k4``: how strongly the output follows ``z``."""
        return self.k3 - self.k4

    @classmethod
    def from_differences(cls, bias: float, slope: float,
                         tol: float = config.REGION_TOL) -> "StrategyWeights":
        """Weights with ``k1-k2 = bias`` and ``k3-k4 = slope``.

        Slack ``1 - |bias| - |slope|`` is split evenly between the discard pair
        and the pass-through pair, and within each pair.
        """
        used = abs(bias) + abs(slope)
        if used > 1 + tol:
            raise Infeasible(used - 1)
        if used > 1:
            bias, slope = bias / used, slope / used
        half_slack = max(0.0, 1.0 - abs(bias) - abs(slope)) / 2
        k1 = (abs(bias) + half_slack + bias) / 2
        k2 = (abs(bias) + half_slack - bias) / 2
        k3 = (abs(slope) + half_slack + slope) / 2
        k4 = (abs(slope) + half_slack - slope) / 2
        return cls(k1, k2, k3, k4)


@dataclass(frozen=True)
class PWStrategy:
    """Discard with probability ``discard_prob`` to ``discard_sign``, else flip with ``flip_prob``."""

    discard_prob: float
    discard_sign: int
    flip_prob: float

    def __post_init__(self):
        if not 0.0 <= self.discard_prob <= 1.0:
            raise ValueError(f"discard probability {self.discard_prob!r} outside [0, 1]")
        if self.discard_sign not in (1, -1):
            raise ValueError("discard sign must be +1 or -1")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise InvalidFlipProbability(self.flip_prob)

    @property
    def y(self) -> float:
        return self.discard_sign * self.discard_prob

    def expectation(self, z: float) -> float:
        return pw_expectation(self.y, self.flip_prob, z)

    def to_weights(self) -> StrategyWeights:
        return pw_to_weights(self.y, self.flip_prob)


Strategy = Union[StrategyWeights, PWStrategy]


def raw_expectation(h: Hyperbit, effect, tol: float = config.MATRIX_TOL) -> float:
    """``<h, effect>`` for an effect vector of norm at most one."""
    effect = np.asarray(effect, dtype=float)
    if np.linalg.norm(effect) > 1 + tol:
        raise NormViolation(f"effect has norm {np.linalg.norm(effect):.12g} > 1")
    return float(np.clip(h.vector @ effect, -1.0, 1.0))


def sample_outcome(E: float, rng: np.random.Generator, size=None):
    """Draw +1 with probability ``(1 + E) / 2`` and -1 otherwise."""
    if not -1.0 <= E <= 1.0:
        raise ExpectationOutOfRange(f"expectation {E!r} outside [-1, 1]")
    p_plus = 0.5 * (1.0 + E)
    if size is None:
        return 1 if rng.random() < p_plus else -1
    return np.where(rng.random(size) < p_plus, 1, -1)


def apply_deterministic(which: int, s: int) -> int:
    """The deterministic maps f1 (+1), f2 (-1), f3 (identity), f4 (flip)."""
    if s not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {s!r}")
    if which == 1:
        return 1
    if which == 2:
        return -1
    if which == 3:
        return s
    if which == 4:
        return -s
    raise ValueError(f"deterministic map index must be 1..4, got {which!r}")


def strategy_expectation(k: StrategyWeights, z: float) -> float:
    return k.k1 - k.k2 + (k.k3 - k.k4) * z


class FlipProbability(NamedTuple):
    value: float
    valid: bool

    def checked(self) -> float:
        """The value, or :class:`InvalidFlipProbability` when out of range."""
        if not self.valid:
            raise InvalidFlipProbability(self.value)
        return self.value


def pw_q(x: float, y: float, tol: float = config.REGION_TOL) -> FlipProbability:
    """Flip probability that makes the discard/flip protocol output ``y + x z``.

    Validity is judged as ``|1 - 2q| (1 - |y|) <= 1 - |y| + tol``, i.e. ``q`` in
    [0, 1] with the tolerance measured on the same scale as ``|x| + |y| <= 1``.
    """
    room = 1.0 - abs(y)
    if room <= 0.0:
        raise DegenerateDiscard(f"|y| = {abs(y)!r}; Bob always discards")
    q = 0.5 * (1.0 - x / room)
    valid = abs(1.0 - 2.0 * q) * room <= room + tol
    return FlipProbability(q, bool(valid))


def pw_expectation(y: float, q: float, z: float, tol: float = config.REGION_TOL) -> float:
    if not -tol <= q <= 1 + tol:
        raise InvalidFlipProbability(q)
    if abs(y) > 1 + tol or abs(z) > 1 + tol:
        raise ExpectationOutOfRange(f"need |y| <= 1 and |z| <= 1, got y={y!r}, z={z!r}")
    return y + (1.0 - abs(y)) * z * (1.0 - 2.0 * q)


def pw_to_weights(y: float, q: float) -> StrategyWeights:
    """Tetrahedron point realizing discard-with-|y| then flip-with-q."""
    if not 0.0 <= q <= 1.0:
        raise InvalidFlipProbability(q)
    ay = min(abs(y), 1.0)
    keep = 1.0 - ay
    return StrategyWeights((ay + y) / 2, (ay - y) / 2, keep * (1.0 - q), keep * q)


def pw_strategy(x: float, y: float, tol: float = config.REGION_TOL) -> PWStrategy:
    """The protocol for coordinates ``(x, y)``; raises when ``q`` leaves [0, 1]."""
    sign = 1 if y >= 0 else -1
    if abs(y) >= 1.0:
        if abs(x) > tol:
            raise InvalidFlipProbability(-math.copysign(math.inf, x))
        return PWStrategy(1.0, sign, 0.0)
    q = pw_q(x, y, tol).checked()
    return PWStrategy(abs(y), sign, min(max(q, 0.0), 1.0))


@dataclass(frozen=True)
class SimulationReport:
    empirical_mean: float
    std_error: float
    samples: int
    seed: int
    analytic: float
    shared_bit: str = "alice"
    backend: str = kernels.BACKEND

    @property
    def deviation(self) -> float:
        return abs(self.empirical_mean - self.analytic)

    def passed(self, sigmas: float = 5.0) -> bool:
        return self.deviation <= sigmas * self.std_error

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def csv_row(self, point: str, strategy: str) -> list:
        return [point, strategy, self.samples, self.seed, repr(self.empirical_mean),
                repr(self.std_error), repr(self.analytic), int(self.passed())]


SIMULATION_CSV_HEADER = ["point", "strategy", "samples", "seed", "empirical",
                         "stderr", "analytic", "pass"]


def _z_of(point) -> float:
    z = float(point.z if hasattr(point, "z") else point)
    if abs(z) > 1.0:
        raise ExpectationOutOfRange(f"raw expectation z={z!r} outside [-1, 1]")
    return z


def simulate_protocol(point, strategy: Strategy, samples: int, seed: int,
                      shared_bit: str = "alice") -> SimulationReport:
    """Monte Carlo run of the hyperbit protocol at one point.

    ``point`` supplies ``z``, the expectation of Bob's raw outcome when the
    shared bit equals Alice's outcome. With ``shared_bit="fair"`` each sample
    draws an independent fair bit ``r``; Alice sends ``r`` times her hyperbit
    and Bob multiplies his raw outcome by his copy of ``r``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if shared_bit not in ("alice", "fair"):
        raise ValueError(f"shared_bit must be 'alice' or 'fair', got {shared_bit!r}")
    z = _z_of(point)
    key = derive_key(seed)
    fair = shared_bit == "fair"
    if isinstance(strategy, StrategyWeights):
        c1 = strategy.k1
        c2 = c1 + strategy.k2
        c3 = c2 + strategy.k3
        total = kernels.mc_weights(z, c1, c2, c3, samples, key, fair)
        analytic = strategy_expectation(strategy, z)
    elif isinstance(strategy, PWStrategy):
        total = kernels.mc_pw(z, strategy.discard_prob, strategy.discard_sign,
                              strategy.flip_prob, samples, key, fair)
        analytic = strategy.expectation(z)
    else:
        raise TypeError(f"unsupported strategy type {type(strategy).__name__}")
    mean = total / samples
    # Every output is +-1, so the sum of squares is exactly ``samples``.
    if samples > 1:
        var = max(0.0, (samples - samples * mean * mean) / (samples - 1))
    else:
        var = 0.0
    return SimulationReport(mean, math.sqrt(var / samples), samples, int(seed),
                            analytic, shared_bit)
