"""Dense bipartite states, dichotomic observables and Born-rule correlations.

Matrices are plain complex ``numpy`` arrays. Tensor products are Alice-major:
the composite index of ``|i>_A |j>_B`` is ``i * dim_bob + j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import config
from .errors import (
    BiasedAlice,
    ConsistencyError,
    DimensionMismatch,
    InvalidObservable,
    InvalidState,
    NonRealCorrelation,
    NotProjective,
    UnknownSetting,
    ZeroProbabilityBranch,
)

Outcome = int  # +1 or -1
BobKey = tuple[str, int]


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array, rejecting ragged or non-2-D input."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def _frozen(m) -> np.ndarray:
    arr = as_matrix(m).copy()
    arr.setflags(write=False)
    return arr


def is_square(m: np.ndarray) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1]


def is_hermitian(m: np.ndarray, tol: float = config.MATRIX_TOL) -> bool:
    return is_square(m) and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def is_unitary(m: np.ndarray, tol: float = config.MATRIX_TOL) -> bool:
    if not is_square(m):
        return False
    eye = np.eye(m.shape[0])
    return bool(np.max(np.abs(m.conj().T @ m - eye), initial=0.0) <= tol)


def is_psd(m: np.ndarray, tol: float = config.MATRIX_TOL) -> bool:
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() >= -tol)


def check_sign(outcome: int) -> int:
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    return int(outcome)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with Alice's factor first."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_alice(m, dim_alice: int, dim_bob: int) -> np.ndarray:
    """Trace out the first (Alice) factor of an operator on ``A (x) B``."""
    m = as_matrix(m)
    n = dim_alice * dim_bob
    if m.shape != (n, n):
        raise DimensionMismatch(
            f"operator of shape {m.shape} does not act on {dim_alice}x{dim_bob}"
        )
    return np.einsum("ijik->jk", m.reshape(dim_alice, dim_bob, dim_alice, dim_bob))


@dataclass(frozen=True, eq=False)
class QuantumState:
    dim_alice: int
    dim_bob: int
    rho: np.ndarray
    tol: float = config.MATRIX_TOL

    def __post_init__(self):
        rho = _frozen(self.rho)
        object.__setattr__(self, "rho", rho)
        n = self.dim_alice * self.dim_bob
        if self.dim_alice < 1 or self.dim_bob < 1:
            raise DimensionMismatch("dimensions must be positive")
        if rho.shape != (n, n):
            raise DimensionMismatch(
                f"rho has shape {rho.shape}, expected ({n}, {n})"
            )
        if not is_hermitian(rho, self.tol):
            raise InvalidState("rho is not Hermitian")
        if not is_psd(rho, self.tol):
            raise InvalidState("rho has a negative eigenvalue")
        tr = np.trace(rho)
        if abs(tr - 1.0) > self.tol:
            raise InvalidState(f"trace(rho) = {tr.real:.12g}, expected 1")

    @property
    def dim(self) -> int:
        return self.dim_alice * self.dim_bob

    @classmethod
    def from_vector(cls, psi, dim_alice: int, dim_bob: int) -> "QuantumState":
        """Pure state ``|psi><psi|``; ``psi`` is normalized first."""
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(dim_alice, dim_bob, np.outer(psi, psi.conj()))


@dataclass(frozen=True, eq=False)
class DichotomicObservable:
    """Hermitian operator with spectrum in [-1, 1]."""

    matrix: np.ndarray
    label: str = ""
    tol: float = config.MATRIX_TOL
    projective: bool = field(init=False)

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        if not is_hermitian(m, self.tol):
            raise InvalidObservable(f"observable {self.label!r} is not Hermitian")
        ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if ev.min() < -1 - self.tol or ev.max() > 1 + self.tol:
            raise InvalidObservable(
                f"observable {self.label!r} has spectrum outside [-1, 1]"
            )
        sq = m @ m
        proj = bool(np.max(np.abs(sq - np.eye(m.shape[0]))) <= self.tol)
        object.__setattr__(self, "projective", proj)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class ProjectorPair:
    p_plus: np.ndarray
    p_minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p_plus", _frozen(self.p_plus))
        object.__setattr__(self, "p_minus", _frozen(self.p_minus))

    def for_outcome(self, outcome: int) -> np.ndarray:
        return self.p_plus if check_sign(outcome) == 1 else self.p_minus


def projectors_from_observable(obs: DichotomicObservable) -> ProjectorPair:
    """Spectral projectors ``(1 +/- A) / 2`` of a projective observable."""
    if not obs.projective:
        raise NotProjective(f"observable {obs.label!r} does not square to identity")
    eye = np.eye(obs.dim)
    return ProjectorPair(0.5 * (eye + obs.matrix), 0.5 * (eye - obs.matrix))


def parse_bob_key(key) -> BobKey:
    """Accept ``(b, A)`` tuples or ``"b|+1"`` strings."""
    if isinstance(key, str):
        b, sep, a = key.partition("|")
        if not sep:
            raise ValueError(f"Bob key {key!r} must look like 'bits|+1'")
        return b, check_sign(int(a))
    b, a = key
    return str(b), check_sign(int(a))


def format_bob_key(key: BobKey) -> str:
    b, a = key
    return f"{b}|{'+1' if a == 1 else '-1'}"


def _observable(m, label: str) -> DichotomicObservable:
    if isinstance(m, DichotomicObservable):
        return m
    return DichotomicObservable(m, label=label)


@dataclass(frozen=True, eq=False)
class BipartiteInstance:
    """Shared state plus Alice's settings ``a`` and Bob's settings ``(b, A)``."""

    state: QuantumState
    alice: Mapping[str, DichotomicObservable]
    bob: Mapping[BobKey, DichotomicObservable]

    def __post_init__(self):
        alice = {str(k): _observable(m, str(k)) for k, m in self.alice.items()}
        bob = {}
        for k, m in self.bob.items():
            key = parse_bob_key(k)
            bob[key] = _observable(m, format_bob_key(key))
        if max(self.state.dim_alice, self.state.dim_bob) > config.MAX_DIM:
            raise DimensionMismatch(
                f"local dimension exceeds the cap of {config.MAX_DIM}"
            )
        for k, obs in alice.items():
            if obs.dim != self.state.dim_alice:
                raise DimensionMismatch(f"Alice observable {k!r} has dim {obs.dim}")
        for k, obs in bob.items():
            if obs.dim != self.state.dim_bob:
                raise DimensionMismatch(
                    f"Bob observable {format_bob_key(k)!r} has dim {obs.dim}"
                )
        object.__setattr__(self, "alice", MappingProxyType(dict(sorted(alice.items()))))
        object.__setattr__(self, "bob", MappingProxyType(dict(sorted(bob.items()))))

    @property
    def alice_settings(self) -> list[str]:
        return list(self.alice)

    @property
    def bob_settings(self) -> list[str]:
        return sorted({b for b, _ in self.bob})

    def alice_observable(self, a: str) -> DichotomicObservable:
        try:
            return self.alice[a]
        except KeyError:
            raise UnknownSetting(f"no Alice observable for setting {a!r}") from None

    def bob_observable(self, b: str, outcome: int) -> DichotomicObservable:
        try:
            return self.bob[(b, check_sign(outcome))]
        except KeyError:
            raise UnknownSetting(
                f"no Bob observable for setting {format_bob_key((b, outcome))!r}"
            ) from None

    def branches(self) -> list[tuple[str, str, int]]:
        """All ``(a, b, A)`` triples for which both parties have an observable."""
        return [
            (a, b, outcome)
            for a in self.alice
            for b in self.bob_settings
            for outcome in (1, -1)
            if (b, outcome) in self.bob
        ]


def _real(value: complex, tol: float, what: str) -> float:
    if abs(value.imag) > tol:
        raise NonRealCorrelation(f"{what} has imaginary part {value.imag:.3g}")
    return float(value.real)


def _matrix_of(obs) -> np.ndarray:
    return obs.matrix if isinstance(obs, DichotomicObservable) else as_matrix(obs)


def born_correlation(inst: BipartiteInstance, a_obs, b_obs,
                     tol: float = config.MATRIX_TOL) -> float:
    """``Tr((A (x) B) rho)`` for one Alice and one Bob operator."""
    a_m, b_m = _matrix_of(a_obs), _matrix_of(b_obs)
    st = inst.state
    if a_m.shape != (st.dim_alice,) * 2 or b_m.shape != (st.dim_bob,) * 2:
        raise DimensionMismatch("operators do not match the instance dimensions")
    value = np.trace(np.kron(a_m, b_m) @ st.rho)
    return _real(value, tol, "correlation")


def alice_bias(inst: BipartiteInstance, a: str) -> float:
    obs = inst.alice_observable(a)
    return born_correlation(inst, obs, np.eye(inst.state.dim_bob))


def _branch_projector(inst: BipartiteInstance, a: str, outcome: int,
                      tol: float) -> np.ndarray:
    obs = inst.alice_observable(a)
    proj = projectors_from_observable(obs).for_outcome(outcome)
    weight = born_correlation(inst, proj, np.eye(inst.state.dim_bob))
    if weight < config.ZERO_BRANCH_TOL:
        raise ZeroProbabilityBranch(
            f"branch a={a!r}, A={outcome:+d} has probability {weight:.3g}"
        )
    if abs(weight - 0.5) > tol:
        raise BiasedAlice(
            f"branch a={a!r}, A={outcome:+d} has probability {weight:.12g}, not 1/2"
        )
    return proj


def steering_state(inst: BipartiteInstance, a: str, outcome: int,
                   tol: float = config.MATRIX_TOL) -> QuantumState:
    """Bob's conditional state after Alice obtains ``outcome`` on setting ``a``."""
    proj = _branch_projector(inst, a, outcome, tol)
    st = inst.state
    joint = np.kron(proj, np.eye(st.dim_bob)) @ st.rho
    reduced = 2.0 * partial_trace_alice(joint, st.dim_alice, st.dim_bob)
    # The product (P (x) 1) rho is not Hermitian; its partial trace is.
    reduced = 0.5 * (reduced + reduced.conj().T)
    return QuantumState(1, st.dim_bob, reduced, tol=max(tol, st.tol))


def bob_quantum_expectation(inst: BipartiteInstance, a: str, b: str, outcome: int,
                            tol: float = config.MATRIX_TOL) -> float:
    """Expectation of Bob's answer on branch ``(a, b, A)``.

    Computed on the steering state and cross-checked against the doubled
    joint trace ``2 Tr((P_a^A (x) B_{b,A}) rho)``.
    """
    bob = inst.bob_observable(b, outcome)
    steered = steering_state(inst, a, outcome, tol)
    via_state = _real(np.trace(bob.matrix @ steered.rho), tol, "expectation")
    proj = projectors_from_observable(inst.alice_observable(a)).for_outcome(outcome)
    via_joint = 2.0 * born_correlation(inst, proj, bob, tol)
    if abs(via_state - via_joint) > config.CROSS_CHECK_TOL:
        raise ConsistencyError(
            f"steering route {via_state!r} disagrees with joint trace {via_joint!r}"
        )
    return via_state


# Standard single-qubit operators used by fixtures, the CLI and tests.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def bell_chsh_instance() -> BipartiteInstance:
    """``|Phi+>`` with Alice in {Z, X} and Bob in {(Z+X)/sqrt2, (Z-X)/sqrt2}.

    Bob uses the same observable for both of Alice's outcomes.
    """
    b0 = (Z + X) / np.sqrt(2)
    b1 = (Z - X) / np.sqrt(2)
    return BipartiteInstance(
        state=QuantumState.from_vector(PHI_PLUS, 2, 2),
        alice={"0": Z, "1": X},
        bob={("0", 1): b0, ("0", -1): b0, ("1", 1): b1, ("1", -1): b1},
    )
