import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbit.errors import (
    DegenerateDiscard,
    ExpectationOutOfRange,
    Infeasible,
    InvalidFlipProbability,
    NormViolation,
)
from hyperbit.protocol import (
    Hyperbit,
    PWStrategy,
    StrategyWeights,
    apply_deterministic,
    pw_expectation,
    pw_q,
    pw_strategy,
    pw_to_weights,
    raw_expectation,
    sample_outcome,
    shared_random_bits,
    simulate_protocol,
    strategy_expectation,
)
from hyperbit.regions import RegionPoint

unit = st.floats(-1.0, 1.0, allow_nan=False)


def test_hyperbit_norm():
    h = Hyperbit(np.array([0.6, 0.8]))
    assert raw_expectation(h, [1.0, 0.0]) == pytest.approx(0.6)
    assert raw_expectation(-h, [0.0, 1.0]) == pytest.approx(-0.8)
    with pytest.raises(NormViolation):
        Hyperbit(np.array([1.0, 1.0]))
    with pytest.raises(NormViolation):
        raw_expectation(h, [1.0, 1.0])


def test_shared_bits_deterministic():
    a = [b.value for b in shared_random_bits(3, 50)]
    assert a == [b.value for b in shared_random_bits(3, 50)]
    assert set(a) == {1, -1}


def test_weights_validation():
    with pytest.raises(ValueError):
        StrategyWeights(0.5, 0.5, 0.5, -0.5)
    with pytest.raises(ValueError):
        StrategyWeights(0.5, 0.5, 0.5, 0.0)
    k = StrategyWeights(0.1, 0.2, 0.3, 0.4)
    assert (k.discard_bias, k.slope) == pytest.approx((-0.1, -0.1))


def test_from_differences_infeasible():
    with pytest.raises(Infeasible) as err:
        StrategyWeights.from_differences(0.6, 0.8)
    assert err.value.violation == pytest.approx(0.4)


def test_deterministic_maps():
    assert [apply_deterministic(j, -1) for j in (1, 2, 3, 4)] == [1, -1, -1, 1]
    with pytest.raises(ValueError):
        apply_deterministic(5, 1)
    with pytest.raises(ValueError):
        apply_deterministic(1, 0)


def test_sample_outcome(rng):
    assert sample_outcome(1.0, rng) == 1
    draws = sample_outcome(0.2, rng, size=200_000)
    assert draws.mean() == pytest.approx(0.2, abs=0.01)
    with pytest.raises(ExpectationOutOfRange):
        sample_outcome(1.5, rng)


def test_pw_q_values():
    assert pw_q(0.0, 0.0) == (0.5, True)
    assert pw_q(1.0, 0.0) == (0.0, True)
    fq = pw_q(0.8, 0.6)
    assert fq.value == pytest.approx(-0.5) and not fq.valid
    with pytest.raises(InvalidFlipProbability):
        fq.checked()
    with pytest.raises(DegenerateDiscard):
        pw_q(0.0, 1.0)


def test_pw_expectation_rejects_bad_q():
    with pytest.raises(InvalidFlipProbability):
        pw_expectation(0.6, -0.5, 0.3)


def test_pw_strategy_edges():
    s = pw_strategy(0.0, 1.0)
    assert s == PWStrategy(1.0, 1, 0.0)
    assert s.expectation(-0.7) == 1.0
    with pytest.raises(InvalidFlipProbability):
        pw_strategy(0.8, 0.6)


@given(unit, unit, unit)
def test_pw_reproduces_target_in_d(x, y, z):
    if abs(x) + abs(y) > 1 or abs(y) >= 1:
        return
    q = pw_q(x, y).value
    assert pw_expectation(y, q, z) == pytest.approx(y + x * z, abs=1e-12)


@given(unit, st.floats(-0.999, 0.999), unit)
def test_pw_weights_agree(x, y, z):
    fq = pw_q(x, y)
    if not fq.valid:
        return
    q = min(max(fq.value, 0.0), 1.0)
    k = pw_to_weights(y, q)
    assert sum(k.as_tuple()) == pytest.approx(1.0, abs=1e-12)
    assert strategy_expectation(k, z) == pytest.approx(pw_expectation(y, q, z), abs=1e-12)


@given(unit, st.floats(-0.999, 0.999))
def test_q_valid_iff_in_d(x, y):
    assert pw_q(x, y).valid == (abs(x) + abs(y) <= 1 + 1e-9)


@pytest.mark.parametrize("shared", ["alice", "fair"])
def test_simulation_matches_analytic(shared):
    k = StrategyWeights(0.25, 0.05, 0.5, 0.2)
    rep = simulate_protocol(RegionPoint(0.3, 0.2, -0.4), k, 200_000, seed=9, shared_bit=shared)
    assert rep.analytic == pytest.approx(0.2 - 0.3 * 0.4)
    assert rep.passed()
    assert rep.std_error == pytest.approx(math.sqrt((1 - rep.empirical_mean ** 2) / 200_000),
                                          rel=1e-3)


def test_simulation_reproducible():
    s = pw_strategy(0.5, -0.3)
    a = simulate_protocol(0.2, s, 50_000, seed=4)
    b = simulate_protocol(0.2, s, 50_000, seed=4)
    c = simulate_protocol(0.2, s, 50_000, seed=5)
    assert a == b
    assert a.empirical_mean != c.empirical_mean


def test_simulation_input_errors():
    k = StrategyWeights(1, 0, 0, 0)
    with pytest.raises(ValueError):
        simulate_protocol(0.0, k, 0, 1)
    with pytest.raises(ValueError):
        simulate_protocol(0.0, k, 10, 1, shared_bit="bob")
    with pytest.raises(ExpectationOutOfRange):
        simulate_protocol(1.5, k, 10, 1)
    assert simulate_protocol(0.0, k, 10, 1).empirical_mean == 1.0
