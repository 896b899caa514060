"""Hand-derived reference values, each checked against the library."""

import math

import numpy as np
import pytest

from hyperbit.errors import Infeasible, InvalidFlipProbability
from hyperbit.harness import certify_point, find_counterexample, verify_equivalence
from hyperbit.protocol import (
    Hyperbit,
    StrategyWeights,
    apply_deterministic,
    pw_expectation,
    pw_q,
    pw_strategy,
    pw_to_weights,
    raw_expectation,
    simulate_protocol,
    strategy_expectation,
)
from hyperbit.quantum_core import (
    I2,
    PHI_PLUS,
    BipartiteInstance,
    DichotomicObservable,
    QuantumState,
    X,
    Z,
    alice_bias,
    bob_quantum_expectation,
    born_correlation,
    partial_trace_alice,
    projectors_from_observable,
    steering_state,
    tensor_product,
)
from hyperbit.regions import (
    RegionLabel,
    RegionPoint,
    admissible_z_interval,
    classify,
    helix_point,
    in_C,
    in_D,
    minimax_gap,
    target_t,
    weights_for,
    z_aware_weights,
)
from hyperbit.tsirelson import coordinates, decompose_vector, gram_of, tsirelson_image

R = 1 / math.sqrt(2)
B_PLUS = (Z + X) / math.sqrt(2)
PHI = QuantumState.from_vector(PHI_PLUS, 2, 2)


def _phi_instance(alice, bob):
    return BipartiteInstance(PHI, {"0": alice}, {("0", 1): bob, ("0", -1): bob})


def test_kron_and_partial_trace():
    assert np.array_equal(tensor_product(np.diag([1, -1]), np.diag([1, -1])).real,
                          np.diag([1, -1, -1, 1]))
    assert np.allclose(partial_trace_alice(PHI.rho, 2, 2), I2 / 2)


def test_projectors_of_x():
    pair = projectors_from_observable(DichotomicObservable(X))
    assert np.allclose(pair.for_outcome(1), 0.5 * np.array([[1, 1], [1, 1]]))
    assert np.allclose(pair.for_outcome(-1), 0.5 * np.array([[1, -1], [-1, 1]]))


def test_born_values():
    inst = _phi_instance(Z, B_PLUS)
    assert born_correlation(inst, I2, I2) == pytest.approx(1.0)
    assert born_correlation(inst, Z, Z) == pytest.approx(1.0)
    assert born_correlation(inst, Z, B_PLUS) == pytest.approx(R)
    zero = BipartiteInstance(QuantumState.from_vector([1, 0, 0, 0], 2, 2), {"0": Z}, {})
    assert alice_bias(zero, "0") == pytest.approx(1.0)


def test_steering_values():
    st = steering_state(_phi_instance(Z, B_PLUS), "0", 1)
    assert np.allclose(st.rho, np.diag([1, 0]))
    minus = np.array([1, -1]) / math.sqrt(2)
    st = steering_state(_phi_instance(X, B_PLUS), "0", -1)
    assert np.allclose(st.rho, np.outer(minus, minus))
    assert bob_quantum_expectation(_phi_instance(Z, B_PLUS), "0", "0", 1) == pytest.approx(R)


def test_gram_values():
    assert np.allclose(gram_of([np.eye(4)], PHI.rho), [[1.0]])
    ops = [np.eye(4), np.kron(Z, I2), np.kron(I2, Z)]
    assert np.allclose(gram_of(ops, PHI.rho), [[1, 0, 0], [0, 1, 1], [0, 1, 1]])


def test_bell_vectors_and_coordinates(bell):
    img = tsirelson_image(bell)
    assert img.alice_vector("0") @ img.bob_vector("0", 1) == pytest.approx(R, abs=1e-8)
    dec = decompose_vector(img.bob_vector("0", 1), img.identity_vector)
    assert (dec.c, dec.n) == pytest.approx((0.0, 1.0), abs=1e-8)
    dec = decompose_vector(np.array([0.6, 0.8]), np.array([1.0, 0.0]))
    assert (dec.c, dec.n) == pytest.approx((0.6, 0.8))
    for outcome in (1, -1):
        p = coordinates(img, "0", "0", outcome)
        assert p.as_tuple() == pytest.approx((1.0, 0.0, outcome * R), abs=1e-8)
        assert target_t(p) == pytest.approx(outcome * R, abs=1e-8)
    # Hyperbit A x_a with A = +1 against Bob's orthogonal effect.
    perp = decompose_vector(img.bob_vector("0", 1), img.identity_vector).y_perp_hat
    assert raw_expectation(Hyperbit(img.alice_vector("0")), perp) == pytest.approx(R, abs=1e-8)


def test_binomial_variance_oracle():
    k = StrategyWeights(0.75, 0.25, 0.0, 0.0)
    rep = simulate_protocol(0.0, k, 1_000_000, seed=17)
    assert abs(rep.empirical_mean - 0.5) <= 4 * math.sqrt((1 - 0.25) / 1e6)


def test_deterministic_and_strategy_values():
    assert apply_deterministic(1, -1) == 1
    assert apply_deterministic(4, 1) == -1
    assert strategy_expectation(StrategyWeights(0.5, 0, 0.5, 0), 0.4) == pytest.approx(0.7)


def test_pw_values():
    fq = pw_q(R, 0.0)
    assert fq.valid and fq.value == pytest.approx((1 - R) / 2)
    fq = pw_q(0.9, 0.5)
    assert not fq.valid and fq.value == pytest.approx(-0.4)
    with pytest.raises(InvalidFlipProbability):
        pw_strategy(0.9, 0.5)
    assert pw_expectation(0.3, pw_q(0.5, 0.3).value, 0.6) == pytest.approx(0.6)
    k = pw_to_weights(0.3, 0.2)
    assert k.as_tuple() == pytest.approx((0.3, 0.0, 0.56, 0.14))
    s = pw_strategy(1.0, 0.0)
    assert s.flip_prob == 0.0 and s.expectation(R) == pytest.approx(R)


def test_region_values():
    boundary = RegionPoint(R, R, math.sqrt(2) - 1)
    assert target_t(boundary) == pytest.approx(1.0)
    assert in_C(boundary)
    assert not in_C(RegionPoint(0.5, 0.9, 1.0))
    assert not in_D(RegionPoint(R, R, 0.0))
    assert in_D(RegionPoint(0.5, 0.5, 1.0))
    assert classify(RegionPoint(0.99, 0.99, 0.0)) is RegionLabel.OUTSIDE_C
    assert z_aware_weights(R, R, math.sqrt(2) - 1).as_tuple() == pytest.approx((1, 0, 0, 0))
    with pytest.raises(Infeasible) as err:
        weights_for(0.9, 0.5)
    assert err.value.violation == pytest.approx(0.4)


def test_admissible_intervals():
    iv = admissible_z_interval(R, R)
    assert (iv.lo, iv.hi) == pytest.approx((-1.0, math.sqrt(2) - 1))
    iv = admissible_z_interval(1.0, 0.0)
    assert (iv.lo, iv.hi) == (-1.0, 1.0)


def test_gap_and_counterexample():
    assert minimax_gap(R, R).gap == pytest.approx(0.2265, abs=1e-4)
    rec = certify_point(R, R)
    assert rec.witness_z_pair == pytest.approx((-1.0, math.sqrt(2) - 1))
    assert min(rec.candidate_violations) >= 0.22
    rec = find_counterexample()
    assert abs(rec.point.x) + abs(rec.point.y) > 1 and rec.max_violation > 0


@pytest.mark.parametrize("tau,expected", [
    (0.0, (1.0, 0.0, 1.0)),
    (math.pi / 2, (0.0, 1.0, 0.0)),
    (math.pi, (-1.0, 0.0, -1.0)),
])
def test_helix_values(tau, expected):
    p = helix_point(tau, 1)
    assert p.as_tuple() == pytest.approx(expected, abs=1e-12)
    assert target_t(p) == pytest.approx(1.0, abs=1e-12)


def test_bell_verify_pw(bell):
    rep = verify_equivalence(bell, "pw")
    assert rep.verdict
    assert all(abs(r.point.x) + abs(r.point.y) == pytest.approx(1.0) for r in rep.branches)
