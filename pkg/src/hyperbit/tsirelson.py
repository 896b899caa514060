"""Tsirelson vectors: real Euclidean images of operators under a shared state.

Every operator ``X`` on the joint space is sent to a real vector so that
``<v_X, v_Y> = Re Tr(X^dagger Y rho)``. For commuting Hermitian pairs
``A (x) 1`` and ``1 (x) B`` this is the Born correlation ``Tr(A (x) B rho)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from . import config
from .errors import BiasedAlice, NonPSDGram, UnknownSetting
from .quantum_core import (
    BipartiteInstance,
    check_sign,
    format_bob_key,
    parse_bob_key,
    projectors_from_observable,
)
from .regions import RegionPoint

IDENTITY = ("identity",)


def alice_label(a: str) -> tuple:
    return ("alice", a)


def alice_projector_label(a: str, outcome: int) -> tuple:
    return ("alice_proj", a, check_sign(outcome))


def bob_label(b: str, outcome: int) -> tuple:
    return ("bob", b, check_sign(outcome))


def gram_of(operators: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Real Gram matrix ``Re Tr(X_i^dagger X_j rho)`` of a list of operators."""
    ops = np.asarray(operators, dtype=complex)
    n = ops.shape[0]
    left = ops.conj().reshape(n, -1)
    right = (ops @ rho).reshape(n, -1)
    gram = (left @ right.T).real
    return 0.5 * (gram + gram.T)


def operator_family(inst: BipartiteInstance) -> tuple[list[tuple], list[np.ndarray]]:
    """Labels and joint-space operators for 1, A_a, P_a^+-, and B_{b,A}."""
    da, db = inst.state.dim_alice, inst.state.dim_bob
    eye_a, eye_b = np.eye(da), np.eye(db)
    labels: list[tuple] = [IDENTITY]
    ops: list[np.ndarray] = [np.eye(da * db)]
    for a, obs in inst.alice.items():
        labels.append(alice_label(a))
        ops.append(np.kron(obs.matrix, eye_b))
        pair = projectors_from_observable(obs)
        for outcome in (1, -1):
            labels.append(alice_projector_label(a, outcome))
            ops.append(np.kron(pair.for_outcome(outcome), eye_b))
    for (b, outcome), obs in inst.bob.items():
        labels.append(bob_label(b, outcome))
        ops.append(np.kron(eye_a, obs.matrix))
    return labels, ops


def build_gram(inst: BipartiteInstance,
               tol: float = config.MATRIX_TOL) -> tuple[np.ndarray, list[tuple]]:
    """Gram matrix of the instance's operator family, with row labels."""
    labels, ops = operator_family(inst)
    gram = gram_of(ops, inst.state.rho)
    _check_psd(gram, tol)
    return gram, labels


def _check_psd(gram: np.ndarray, tol: float) -> np.ndarray:
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise NonPSDGram(f"Gram matrix must be square, got shape {gram.shape}")
    if np.max(np.abs(gram - gram.T), initial=0.0) > tol:
        raise NonPSDGram("Gram matrix is not symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (gram + gram.T))
    if evals.size and evals[0] < -tol:
        raise NonPSDGram(f"Gram matrix has eigenvalue {evals[0]:.3g}")
    return evals, evecs


def factorize(gram: np.ndarray, tol: float = config.MATRIX_TOL,
              cutoff: float = config.RANK_CUTOFF) -> np.ndarray:
    """Columns ``V[:, j]`` with ``V.T @ V == gram``; rows span the numerical rank."""
    gram = np.asarray(gram, dtype=float)
    evals, evecs = _check_psd(gram, tol)
    if evals.size == 0:
        return np.zeros((0, 0))
    top = max(evals[-1], 0.0)
    keep = evals > cutoff * top if top > 0 else np.zeros_like(evals, dtype=bool)
    # eigh sorts ascending; emit the dominant direction first.
    keep_idx = np.flatnonzero(keep)[::-1]
    vals = np.clip(evals[keep_idx], 0.0, None)
    return np.sqrt(vals)[:, None] * evecs[:, keep_idx].T


@dataclass(frozen=True, eq=False)
class TsirelsonImage:
    dimension: int
    identity_vector: np.ndarray
    alice_vectors: Mapping[str, np.ndarray]
    alice_projector_vectors: Mapping[tuple[str, int], np.ndarray]
    bob_vectors: Mapping[tuple[str, int], np.ndarray]

    def alice_vector(self, a: str) -> np.ndarray:
        try:
            return self.alice_vectors[a]
        except KeyError:
            raise UnknownSetting(f"no Alice vector for setting {a!r}") from None

    def bob_vector(self, b: str, outcome: int) -> np.ndarray:
        try:
            return self.bob_vectors[(b, check_sign(outcome))]
        except KeyError:
            raise UnknownSetting(
                f"no Bob vector for {format_bob_key((b, outcome))!r}"
            ) from None

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "identity": self.identity_vector.tolist(),
            "alice": {a: v.tolist() for a, v in self.alice_vectors.items()},
            "alice_projectors": {
                format_bob_key(k): v.tolist()
                for k, v in self.alice_projector_vectors.items()
            },
            "bob": {format_bob_key(k): v.tolist() for k, v in self.bob_vectors.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "TsirelsonImage":
        vec = lambda v: np.asarray(v, dtype=float)  # noqa: E731
        return cls(
            dimension=int(data["dimension"]),
            identity_vector=vec(data["identity"]),
            alice_vectors={a: vec(v) for a, v in data["alice"].items()},
            alice_projector_vectors={
                parse_bob_key(k): vec(v) for k, v in data["alice_projectors"].items()
            },
            bob_vectors={parse_bob_key(k): vec(v) for k, v in data["bob"].items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "TsirelsonImage":
        return cls.from_dict(json.loads(text))


def factorize_to_image(gram: np.ndarray, labels: Sequence[Hashable],
                       tol: float = config.MATRIX_TOL) -> TsirelsonImage:
    """Factorize a labelled Gram matrix and route the columns by label."""
    vectors = factorize(gram, tol)
    if len(labels) != vectors.shape[1]:
        raise ValueError(f"{len(labels)} labels for a {vectors.shape[1]}-column Gram")
    by_label = {lab: vectors[:, j].copy() for j, lab in enumerate(labels)}
    for v in by_label.values():
        v.setflags(write=False)
    if IDENTITY not in by_label:
        raise ValueError("operator family must contain the identity")
    return TsirelsonImage(
        dimension=vectors.shape[0],
        identity_vector=by_label[IDENTITY],
        alice_vectors={lab[1]: v for lab, v in by_label.items() if lab[0] == "alice"},
        alice_projector_vectors={
            (lab[1], lab[2]): v for lab, v in by_label.items() if lab[0] == "alice_proj"
        },
        bob_vectors={(lab[1], lab[2]): v for lab, v in by_label.items() if lab[0] == "bob"},
    )


def tsirelson_image(inst: BipartiteInstance,
                    tol: float = config.MATRIX_TOL) -> TsirelsonImage:
    gram, labels = build_gram(inst, tol)
    return factorize_to_image(gram, labels, tol)


@dataclass(frozen=True, eq=False)
class BobEffectDecomposition:
    """``y = c * y_1 + n * y_perp_hat`` with ``y_perp_hat`` orthogonal to ``y_1``."""

    c: float
    n: float
    y_perp_hat: np.ndarray
    degenerate: bool


def decompose_vector(y: np.ndarray, identity: np.ndarray,
                     tol: float = config.MATRIX_TOL) -> BobEffectDecomposition:
    c = float(identity @ y)
    perp = y - c * identity
    n = float(np.linalg.norm(perp))
    if n < tol:
        return BobEffectDecomposition(c, 0.0, np.zeros_like(y), True)
    return BobEffectDecomposition(c, n, perp / n, False)


def decompose_bob_effect(image: TsirelsonImage, b: str, outcome: int,
                         tol: float = config.MATRIX_TOL) -> BobEffectDecomposition:
    return decompose_vector(image.bob_vector(b, outcome), image.identity_vector, tol)


def coordinates(image: TsirelsonImage, a: str, b: str, outcome: int,
                tol: float = config.MATRIX_TOL) -> RegionPoint:
    """``(x, y, z)`` of branch ``(a, b, A)``: ``x = n``, ``y = c``, ``z = A <x_a, y_perp_hat>``."""
    outcome = check_sign(outcome)
    x_a = image.alice_vector(a)
    bias = float(x_a @ image.identity_vector)
    if abs(bias) > tol:
        raise BiasedAlice(f"setting {a!r} has bias {bias:.3g}")
    dec = decompose_bob_effect(image, b, outcome, tol)
    z = 0.0 if dec.degenerate else outcome * float(x_a @ dec.y_perp_hat)
    return RegionPoint(dec.n, dec.c, z)
