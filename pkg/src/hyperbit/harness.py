"""End-to-end comparison of the quantum and hyperbit descriptions, branch by branch."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import config
from .errors import (
    Infeasible,
    InvalidFlipProbability,
    NotFound,
    RejectionBudgetExceeded,
)
from .protocol import StrategyWeights, pw_strategy, strategy_expectation
from .quantum_core import (
    BipartiteInstance,
    QuantumState,
    X,
    Y,
    Z,
    bob_quantum_expectation,
)
from .regions import (
    RegionPoint,
    in_D,
    minimax_gap,
    weights_for,
    z_aware_weights,
)
from .tsirelson import coordinates, tsirelson_image

MODES = ("pw", "fixed", "z-aware")
_MODE_ALIASES = {
    "pw": "pw",
    "fixed": "fixed",
    "general_fixed_k": "fixed",
    "z-aware": "z-aware",
    "z_aware": "z-aware",
}
MATCH_TOL = 1e-8


def bitstring_keys(n: int) -> list[str]:
    width = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    return [format(i, f"0{width}b") for i in range(n)]


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _unbiased_observable(rng: np.random.Generator, rho_a: np.ndarray) -> np.ndarray:
    """A random A with A^2 = 1 and Tr(A rho_a) = 0 exactly.

    Eigenvectors of ``rho_a`` are paired at random and each pair carries a
    phase-rotated X: the observable is off-diagonal in the eigenbasis of
    ``rho_a``, hence unbiased.
    """
    d = rho_a.shape[0]
    _, vecs = np.linalg.eigh(rho_a)
    order = rng.permutation(d)
    a = np.zeros((d, d), dtype=complex)
    for j in range(0, d, 2):
        e, f = vecs[:, order[j]], vecs[:, order[j + 1]]
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        a += phase * np.outer(e, f.conj()) + np.conj(phase) * np.outer(f, e.conj())
    return 0.5 * (a + a.conj().T)


def _random_bob_observable(rng: np.random.Generator, d: int, projective: bool) -> np.ndarray:
    u = _haar_unitary(rng, d)
    if projective:
        spectrum = rng.choice([-1.0, 1.0], size=d)
    else:
        spectrum = rng.uniform(-1.0, 1.0, size=d)
    b = (u * spectrum) @ u.conj().T
    return 0.5 * (b + b.conj().T)


def random_instance(dim_alice: int, dim_bob: int, n_alice_settings: int,
                    n_bob_settings: int, seed: int, *, bob_projective: bool = True,
                    max_rejections: int = 100,
                    bias_tol: float = 1e-12) -> BipartiteInstance:
    """Seeded random state with unbiased projective Alice observables.

    ``rho = G G^dagger / Tr(G G^dagger)`` for a complex Gaussian ``G``. Bob gets
    an independent observable for every ``(b, A)``; with
    ``bob_projective=False`` its spectrum is uniform in [-1, 1] instead of +-1.
    """
    if min(dim_alice, dim_bob) < 2:
        raise ValueError("dimensions must be at least 2")
    if max(dim_alice, dim_bob) > config.MAX_DIM:
        raise ValueError(f"dimensions above the cap of {config.MAX_DIM}")
    if dim_alice % 2:
        raise ValueError("an unbiased projective Alice observable needs even dim_alice")
    if n_alice_settings < 1 or n_bob_settings < 1:
        raise ValueError("need at least one setting per party")
    rng = np.random.default_rng(seed)
    rho = _random_state(rng, dim_alice * dim_bob)
    rho_a = np.einsum("ijkj->ik", rho.reshape(dim_alice, dim_bob, dim_alice, dim_bob))
    alice = {}
    for a in bitstring_keys(n_alice_settings):
        for _ in range(max_rejections):
            obs = _unbiased_observable(rng, rho_a)
            if abs(np.trace(obs @ rho_a)) < bias_tol:
                alice[a] = obs
                break
        else:
            raise RejectionBudgetExceeded(f"no unbiased observable for setting {a!r}")
    bob = {
        (b, outcome): _random_bob_observable(rng, dim_bob, bob_projective)
        for b in bitstring_keys(n_bob_settings)
        for outcome in (1, -1)
    }
    return BipartiteInstance(QuantumState(dim_alice, dim_bob, rho), alice, bob)


def partially_entangled_instance(p: float = 0.8) -> BipartiteInstance:
    """``sqrt(p)|00> + sqrt(1-p)|11>`` with Alice in {X, Y} and Bob in {Z, X}.

    Bob's Z branch sits at ``(x, y) = (2 sqrt(p(1-p)), 2p - 1)``; for p = 0.8
    that is (0.8, 0.6), outside D. Bob's X branch sits at (1, 0), on D's edge.
    """
    psi = np.array([math.sqrt(p), 0, 0, math.sqrt(1 - p)], dtype=complex)
    return BipartiteInstance(
        QuantumState.from_vector(psi, 2, 2),
        alice={"0": X, "1": Y},
        bob={("0", 1): Z, ("0", -1): Z, ("1", 1): X, ("1", -1): X},
    )


@dataclass(frozen=True)
class BranchRecord:
    a: str
    b: str
    outcome: int
    quantum: float
    point: RegionPoint
    q: float | None
    q_valid: bool | None
    hyperbit: float | None
    diff: float | None
    passed: bool
    in_D: bool
    weights: tuple[float, float, float, float] | None = None
    failure: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"] = {"x": self.point.x, "y": self.point.y, "z": self.point.z,
                      "t": self.point.t}
        d["A"] = d.pop("outcome")
        d["pass"] = d.pop("passed")
        return d


EQUIVALENCE_CSV_HEADER = ["a", "b", "A", "x", "y", "z", "t", "q", "q_valid",
                          "hyperbit_value", "diff", "pass"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class EquivalenceReport:
    mode: str
    branches: list[BranchRecord] = field(default_factory=list)
    tol: float = MATCH_TOL

    @property
    def verdict(self) -> bool:
        return all(r.passed for r in self.branches)

    @property
    def failures(self) -> list[BranchRecord]:
        return [r for r in self.branches if not r.passed]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "tolerance": self.tol,
            "verdict": "pass" if self.verdict else "fail",
            "branches": [r.to_dict() for r in self.branches],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(EQUIVALENCE_CSV_HEADER)
        for r in self.branches:
            p = r.point
            w.writerow([r.a, r.b, f"{r.outcome:+d}", _fmt(p.x), _fmt(p.y), _fmt(p.z),
                        _fmt(p.t), _fmt(r.q), _fmt(r.q_valid), _fmt(r.hyperbit),
                        _fmt(r.diff), _fmt(r.passed)])
        return buf.getvalue()


def _hyperbit_side(mode: str, p: RegionPoint, tol: float):
    """(value, weights, failure) for one branch; value is None on failure."""
    if mode == "pw":
        try:
            strategy = pw_strategy(p.x, p.y, config.REGION_TOL)
        except InvalidFlipProbability as exc:
            return None, None, f"InvalidFlipProbability: q={exc.q!r}"
        k = strategy.to_weights()
        return strategy.expectation(p.z), k, None
    if mode == "fixed":
        try:
            k = weights_for(p.x, p.y, config.REGION_TOL)
        except Infeasible as exc:
            best = minimax_gap(p.x, p.y, config.REGION_TOL).best_weights
            return (strategy_expectation(best, p.z), best,
                    f"Infeasible: |x|+|y| exceeds 1 by {exc.violation!r}")
        return strategy_expectation(k, p.z), k, None
    k = z_aware_weights(p.x, p.y, p.z, config.REGION_TOL)
    return strategy_expectation(k, p.z), k, None


def verify_equivalence(inst: BipartiteInstance, mode: str = "pw",
                       tol: float = MATCH_TOL) -> EquivalenceReport:
    """Compare quantum and hyperbit expectations on every branch ``(a, b, A)``.

    ``pw`` uses the discard/flip protocol, ``fixed`` the best strategy chosen
    from ``(x, y)`` alone, ``z-aware`` a strategy that also knows ``z``.
    Branches the hyperbit side cannot reproduce are reported, not raised.
    """
    try:
        mode = _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}") from None
    image = tsirelson_image(inst)
    records = []
    for a, b, outcome in inst.branches():
        quantum = bob_quantum_expectation(inst, a, b, outcome)
        p = coordinates(image, a, b, outcome)
        q = q_valid = None
        if abs(p.y) < 1:
            q = 0.5 * (1.0 - p.x / (1.0 - abs(p.y)))
            q_valid = abs(p.x) <= 1 - abs(p.y) + config.REGION_TOL
        value, k, failure = _hyperbit_side(mode, p, tol)
        diff = None if value is None else abs(value - quantum)
        passed = failure is None and diff is not None and diff <= tol
        records.append(BranchRecord(
            a, b, outcome, quantum, p, q, q_valid, value, diff, passed,
            in_D(p, config.REGION_TOL), None if k is None else k.as_tuple(), failure,
        ))
    return EquivalenceReport(mode, records, tol)


@dataclass(frozen=True)
class CounterexampleRecord:
    point: RegionPoint
    candidate_weights: list[StrategyWeights]
    candidate_violations: list[float]
    max_violation: float
    witness_z_pair: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "point": {"x": self.point.x, "y": self.point.y, "z": self.point.z},
            "candidates": [
                {"weights": list(k.as_tuple()), "violation": v}
                for k, v in zip(self.candidate_weights, self.candidate_violations)
            ],
            "max_violation": self.max_violation,
            "witness_z_pair": list(self.witness_z_pair),
        }


def _violation(k: StrategyWeights, x: float, y: float, zs) -> float:
    return max(abs(strategy_expectation(k, z) - (y + x * z)) for z in zs)


def certify_point(x: float, y: float, tol: float = config.REGION_TOL) -> CounterexampleRecord:
    """Certify that no z-independent strategy reproduces ``t`` at ``(x, y)``.

    The witness pair is the admissible-z interval's endpoints; every strategy
    misses ``t`` by at least the minimax gap at one of them.
    """
    report = minimax_gap(x, y, tol)
    if report.gap <= tol:
        raise NotFound(f"(x, y) = ({x!r}, {y!r}) admits a z-independent strategy")
    zs = (report.admissible_z.lo, report.admissible_z.hi)
    candidates = [report.best_weights]
    for z in zs:
        candidates.append(z_aware_weights(x, y, z, tol))
    used = abs(x) + abs(y)
    candidates.append(StrategyWeights.from_differences(y / used, x / used, tol))
    violations = [_violation(k, x, y, zs) for k in candidates]
    return CounterexampleRecord(RegionPoint(x, y, report.worst_z), candidates,
                                violations, report.gap, zs)


def find_counterexample(nx: int = 41, ny: int = 41,
                        x_range: tuple[float, float] = (-1.0, 1.0),
                        y_range: tuple[float, float] = (-1.0, 1.0),
                        tol: float = config.REGION_TOL) -> CounterexampleRecord:
    """Grid point of the unit disk with the largest minimax gap, certified."""
    best = None
    for x in np.linspace(*x_range, nx):
        for y in np.linspace(*y_range, ny):
            x, y = float(x), float(y)
            if x * x + y * y > 1 + tol:
                continue
            gap = minimax_gap(x, y, tol).gap
            if gap > tol and (best is None or gap > best[0]):
                best = (gap, x, y)
    if best is None:
        raise NotFound("grid does not reach C \\ D")
    return certify_point(best[1], best[2], tol)
