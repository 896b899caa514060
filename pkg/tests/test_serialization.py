import json

import numpy as np
import pytest

from hyperbit.errors import DimensionMismatch
from hyperbit.harness import random_instance, verify_equivalence
from hyperbit.serialization import (
    dump_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    matrix_from_json,
    matrix_to_json,
)


def test_matrix_roundtrip():
    m = np.array([[1 + 2j, 0.5], [-3j, 4]])
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)
    with pytest.raises(DimensionMismatch):
        matrix_from_json([[1, 2], [3, 4]])


def test_instance_roundtrip(tmp_path, bell):
    inst = random_instance(2, 3, 2, 2, seed=8, bob_projective=False)
    path = tmp_path / "inst.json"
    dump_instance(inst, path)
    back = load_instance(path)
    assert np.array_equal(back.state.rho, inst.state.rho)
    assert back.bob.keys() == inst.bob.keys()
    assert instance_to_dict(back) == instance_to_dict(inst)
    a = verify_equivalence(inst, "z-aware").to_json()
    assert verify_equivalence(back, "z-aware").to_json() == a
    assert json.loads(dump_instance(bell))["bob"].keys() == {"0|+1", "0|-1", "1|+1", "1|-1"}


def test_missing_field(bell):
    data = instance_to_dict(bell)
    del data["rho"]
    with pytest.raises(ValueError, match="rho"):
        instance_from_dict(data)
