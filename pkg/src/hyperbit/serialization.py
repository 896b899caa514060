"""JSON form of bipartite instances.

Matrices are nested row lists of ``[re, im]`` pairs. Bob's observables are
keyed ``"<bits>|+1"`` / ``"<bits>|-1"`` by his setting and Alice's outcome.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .quantum_core import BipartiteInstance, QuantumState, format_bob_key


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise DimensionMismatch("matrix must be a 2-D array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def instance_to_dict(inst: BipartiteInstance) -> dict:
    return {
        "dim_alice": inst.state.dim_alice,
        "dim_bob": inst.state.dim_bob,
        "rho": matrix_to_json(inst.state.rho),
        "alice": {a: matrix_to_json(o.matrix) for a, o in inst.alice.items()},
        "bob": {format_bob_key(k): matrix_to_json(o.matrix) for k, o in inst.bob.items()},
    }


def instance_from_dict(data: dict) -> BipartiteInstance:
    try:
        state = QuantumState(int(data["dim_alice"]), int(data["dim_bob"]),
                             matrix_from_json(data["rho"]))
        alice = {str(a): matrix_from_json(m) for a, m in data["alice"].items()}
        bob = {k: matrix_from_json(m) for k, m in data["bob"].items()}
    except KeyError as exc:
        raise ValueError(f"instance is missing field {exc.args[0]!r}") from None
    return BipartiteInstance(state, alice, bob)


def dump_instance(inst: BipartiteInstance, path: str | Path | None = None) -> str:
    text = json.dumps(instance_to_dict(inst), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def load_instance(path: str | Path) -> BipartiteInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
