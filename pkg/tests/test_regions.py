import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate

from hyperbit.errors import EmptyInterval, Infeasible
from hyperbit.regions import (
    RegionLabel,
    RegionPoint,
    admissible_z_interval,
    classify,
    feasible_by_grid,
    gap_oracle,
    helix,
    helix_point,
    in_C,
    in_D,
    minimax_gap,
    scan_region,
    target_t,
    volume_fraction,
    weights_for,
    z_aware_weights,
    z_from_weights,
)
from hyperbit.protocol import strategy_expectation

unit = st.floats(-1.0, 1.0, allow_nan=False)
EXACT_GAP = (2 - math.sqrt(2)) / (4 - math.sqrt(2))


def _volume_of_c():
    """vol(C) by quadrature over the disk of the admissible-z length."""
    def length(y, x):
        iv = admissible_z_interval(x, y)
        return max(iv.hi - iv.lo, 0.0)

    def inner(x):
        r = math.sqrt(max(1 - x * x, 0.0))
        # Kinks where an endpoint of the z interval leaves [-1, 1].
        kinks = sorted(k for k in (1 - abs(x), abs(x) - 1) if -r < k < r)
        return integrate.quad(length, -r, r, args=(x,), points=kinks or None,
                              limit=200, epsabs=1e-11)[0]

    return integrate.quad(inner, -1, 1, limit=200, epsabs=1e-10)[0]


@given(unit, unit, unit)
def test_d_inside_c(x, y, z):
    p = RegionPoint(x, y, z)
    if in_D(p):
        assert in_C(p)
        assert classify(p) is RegionLabel.INSIDE_D


def test_classify_examples():
    assert classify(RegionPoint(0.2, 0.2, 0.9)) is RegionLabel.INSIDE_D
    assert classify(RegionPoint(0.8, 0.6, 0.5)) is RegionLabel.IN_C_NOT_D
    assert classify(RegionPoint(0.8, 0.6, 0.6)) is RegionLabel.OUTSIDE_C
    assert classify(RegionPoint(0.9, 0.5, 0.0)) is RegionLabel.OUTSIDE_C


@given(unit, unit)
def test_weights_for_feasibility(x, y):
    if abs(x) + abs(y) <= 1:
        k = weights_for(x, y)
        assert min(k.as_tuple()) >= 0
        assert (k.discard_bias, k.slope) == pytest.approx((y, x), abs=1e-12)
    elif abs(x) + abs(y) > 1 + 1e-9:
        with pytest.raises(Infeasible):
            weights_for(x, y)


@given(unit, unit, unit)
def test_z_aware_matches_target_in_c(x, y, z):
    p = RegionPoint(x, y, z)
    assume(in_C(p, 0.0))
    k = z_aware_weights(x, y, z)
    assert strategy_expectation(k, z) == pytest.approx(target_t(p), abs=1e-12)
    if in_D(p, 0.0):
        assert k.as_tuple() == pytest.approx(weights_for(x, y).as_tuple(), abs=1e-12)


def test_z_aware_rejects_outside_c():
    with pytest.raises(Infeasible):
        z_aware_weights(0.8, 0.6, 0.9)


def test_z_from_weights():
    k = z_aware_weights(0.8, 0.6, 0.3)
    assert z_from_weights(k, 0.8, 0.6) == pytest.approx(0.3)


def test_admissible_interval():
    iv = admissible_z_interval(0.8, 0.6)
    assert (iv.lo, iv.hi) == pytest.approx((-1.0, 0.5))
    with pytest.raises(EmptyInterval):
        admissible_z_interval(0.0, 1.5)


def test_gap_anchor():
    rep = minimax_gap(1 / math.sqrt(2), 1 / math.sqrt(2))
    assert rep.gap == pytest.approx(EXACT_GAP, abs=1e-12)
    assert rep.gap > 0.2
    assert gap_oracle(1 / math.sqrt(2), 1 / math.sqrt(2)) == pytest.approx(rep.gap, abs=1e-3)


@given(unit, unit)
def test_gap_zero_in_d(x, y):
    assume(abs(x) + abs(y) <= 1)
    assert minimax_gap(x, y).gap == 0.0


@given(unit, unit)
def test_gap_never_above_oracle(x, y):
    assume(x * x + y * y <= 1)
    rep = minimax_gap(x, y)
    oracle = gap_oracle(x, y, steps=200)
    # The oracle restricts to a lattice, so it can only be worse.
    assert rep.gap <= oracle + 1e-12
    assert oracle - rep.gap < 0.02


@given(unit, unit)
def test_feasible_by_grid_outside_band(x, y):
    # Points infeasible by less than one lattice step are ambiguous by design.
    margin = abs(x) + abs(y) - 1
    assume(margin <= 0 or margin > 1e-2)
    assert feasible_by_grid(x, y, resolution=1e-2) == (margin <= 0)


def test_helix_identities():
    for tau, branch, p in helix(101):
        assert p.x ** 2 + p.y ** 2 == pytest.approx(1.0, abs=1e-12)
        assert abs(target_t(p)) == pytest.approx(1.0, abs=1e-12)
    assert helix_point(math.pi / 2, 1).as_tuple() == (pytest.approx(0.0), 1.0, 0.0)
    with pytest.raises(ValueError):
        helix_point(4.0, 1)


def test_volume_fraction_matches_quadrature():
    exact = 4.0 / _volume_of_c()
    assert volume_fraction(400_000, seed=3) == pytest.approx(exact, abs=5e-3)


def test_scan_counts():
    res = scan_region(5, 5, 3, with_gap=True, volume_samples=0)
    assert sum(res.counts.values()) == 75
    assert len(res.rows) == 75
    text = res.to_csv()
    assert text.splitlines()[0] == "x,y,z,t,in_C,in_D,q,q_valid,gap"
    assert math.isnan(res.summary()["volume_fraction_D_over_C"])
