import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcregions.errors import ModelError, UnsupportedSizeError
from bcregions.gaussian import (
    DiscreteStrategy,
    DpcParams,
    GaussianBC,
    GaussianSplit,
    dpc_gap,
    dpc_rates,
    dpc_weighted,
    gaussian_dominance_check,
    jackknife,
    power_split_rates,
    power_split_region,
    power_split_support,
    scalar_superposition_max,
    strategy_samples,
    vector_superposition_max,
)

import oracles

LN2 = np.log(2)
BC = GaussianBC.scalar(1.0, 2.0, 10.0, 0.8, 0.3)


def test_split_rates_by_formula():
    pt = power_split_rates(BC, GaussianSplit([[10.0]], [[4.0]]))
    assert pt.r1 == pytest.approx((0.8 * np.log(5) + 0.2 * np.log(3)) / LN2, abs=1e-12)
    assert pt.r2 == pytest.approx((0.3 * np.log(11 / 5) + 0.7 * np.log(12 / 6)) / LN2, abs=1e-12)


def test_split_extremes():
    full = power_split_rates(BC, GaussianSplit([[10.0]], [[10.0]]))
    assert full.r2 == pytest.approx(0.0, abs=1e-12)
    assert full.r1 == pytest.approx(0.8 * np.log2(11) + 0.2 * np.log2(6))
    assert power_split_rates(BC, GaussianSplit([[10.0]], [[0.0]])).r1 == pytest.approx(0.0, abs=1e-12)


def test_model_validation():
    with pytest.raises(ModelError):
        GaussianBC.scalar(2.0, 1.0, 10.0, 0.5, 0.5)
    with pytest.raises(ModelError):
        GaussianSplit([[1.0]], [[2.0]])
    with pytest.raises(ModelError):
        power_split_rates(BC, GaussianSplit([[11.0]], [[1.0]]))
    with pytest.raises(UnsupportedSizeError):
        GaussianBC(np.eye(4), np.eye(4), np.eye(4), 1.0, 0.5, 0.5)
    with pytest.raises(ModelError):
        power_split_support(GaussianBC.scalar(1.0, 2.0, 10.0, 0.3, 0.8), (1, 1))


def test_scalar_rates_are_monotone_in_split():
    prev = None
    for k1 in np.linspace(0, 10, 21):
        pt = power_split_rates(BC, GaussianSplit([[10.0]], [[k1]]))
        if prev is not None:
            assert pt.r1 >= prev.r1 - 1e-12 and pt.r2 <= prev.r2 + 1e-12
        prev = pt


def test_vector_rates_are_monotone_for_commuting_splits():
    bc = GaussianBC(np.eye(2), np.eye(2), np.diag([2.0, 3.0]), 10.0, 0.7, 0.4)
    k = np.diag([6.0, 4.0])
    r_lo = power_split_rates(bc, GaussianSplit(k, np.diag([1.0, 1.0])))
    r_hi = power_split_rates(bc, GaussianSplit(k, np.diag([3.0, 2.0])))
    assert r_hi.r1 >= r_lo.r1 and r_hi.r2 <= r_lo.r2


@pytest.mark.parametrize("lam", [0.5, 1.2, 2.0, 4.0])
def test_scalar_support_matches_dense_grid(lam):
    val, _, _ = scalar_superposition_max(BC, 1.0, lam)
    assert val / LN2 == pytest.approx(oracles.gaussian_split_brute(1, 2, 10, 0.8, 0.3, lam), abs=1e-6)


def test_first_receiver_capacity_direction():
    s = power_split_support(BC, (1.0, 0.0))
    assert s.value == pytest.approx(0.8 * np.log2(11) + 0.2 * np.log2(6), abs=1e-9)


@pytest.mark.parametrize("lam", [0.5, 1.5, 3.0])
def test_fixed_degraded_channel_matches_textbook(lam):
    bc = GaussianBC.scalar(1.0, 4.0, 10.0, 1.0, 0.0)
    s = power_split_support(bc, (1.0, lam))
    assert s.value == pytest.approx(oracles.degraded_gaussian_bc_brute(1, 4, 10, lam), abs=1e-6)


def test_equal_noise_gives_time_division():
    bc = GaussianBC.scalar(1.5, 1.5, 10.0, 0.6, 0.2)
    c = np.log2(1 + 10 / 1.5)
    for lam in (0.5, 1.0, 2.0):
        assert power_split_support(bc, (1.0, lam)).value == pytest.approx(max(1, lam) * c, abs=1e-9)


def test_supports_convex_in_weight_and_boundary_concave():
    lams = np.geomspace(0.2, 5, 15)
    h = np.array([power_split_support(BC, (1.0, l), resolution=200).value for l in lams])
    # support of a convex region is convex along any line of directions
    for i in range(1, len(lams) - 1):
        t = (lams[i] - lams[i - 1]) / (lams[i + 1] - lams[i - 1])
        assert h[i] <= (1 - t) * h[i - 1] + t * h[i + 1] + 1e-9
    reg = power_split_region(BC, [(1.0, l) for l in lams], resolution=200)
    reg.validate()


def test_vector_with_idle_dimension_reduces_to_scalar():
    bc = GaussianBC(np.diag([1.0, 0.0]), np.eye(2), np.diag([2.0, 5.0]), 10.0, 0.8, 0.3)
    vec, k, k1 = vector_superposition_max(bc, 1.0, 1.5, restarts=8)
    sc, _, _ = scalar_superposition_max(BC, 1.0, 1.5)
    assert vec == pytest.approx(sc, abs=1e-6)
    assert np.trace(k) == pytest.approx(10.0)
    GaussianSplit(k, k1)


def test_vector_beats_fixed_feasible_splits():
    bc = GaussianBC(np.array([[1.0, 0.3], [0.0, 1.0]]), np.eye(2), np.diag([2.0, 3.0]), 8.0, 0.7, 0.4)
    val, _, _ = vector_superposition_max(bc, 1.0, 1.5, restarts=8)
    for a in (0.0, 0.3, 0.7, 1.0):
        pt = power_split_rates(bc, GaussianSplit(np.eye(2) * 4, np.eye(2) * 4 * a))
        assert val / LN2 >= pt.r1 + 1.5 * pt.r2 - 1e-9


# -- dirty paper coding ---------------------------------------------------------

def test_dpc_axis_points():
    r = dpc_rates(BC, DpcParams(np.sqrt(10.0), 0.0, 0.0))
    assert r.r1 == pytest.approx(0.8 * np.log2(11) + 0.2 * np.log2(6))
    assert r.r2 == pytest.approx(0.0)
    r = dpc_rates(BC, DpcParams(0.0, np.sqrt(10.0), 0.0))
    assert r.r2 == pytest.approx(0.3 * np.log2(11) + 0.7 * np.log2(6))
    with pytest.raises(ModelError):
        DpcParams(1.0, 1.0, 1.0)
    with pytest.raises(ModelError):
        dpc_rates(BC, DpcParams(3.0, 3.0, 0.5))


@pytest.mark.parametrize("rho,a", [(0.3, 1.2), (0.6, 2.0), (-0.4, 0.8)])
def test_dpc_equality_condition_closes_the_gap(rho, a):
    # with p1 = 1 only the first noise enters; a b (1 - rho^2) = rho N1 makes
    # the chosen split exactly as good as the dirty-paper sum rate
    n1 = 1.0
    om = 1 - rho**2
    b = rho * n1 / (a * om)
    T = a * a + b * b + 2 * a * b * rho
    bc = GaussianBC.scalar(n1, 2.0, T, 1.0, 0.3)
    split = power_split_rates(bc, GaussianSplit([[T]], [[a * a * om]]))
    d = dpc_rates(bc, DpcParams(a, b, rho))
    assert split.r1 + split.r2 == pytest.approx(d.sum_rate, abs=1e-12)
    # off the condition the split is strictly better
    d2 = dpc_rates(bc, DpcParams(a, 0.5 * b, rho))
    t2 = a * a + 0.25 * b * b + a * b * rho
    s2 = power_split_rates(bc, GaussianSplit([[t2]], [[a * a * om]]))
    assert s2.r1 + s2.r2 > d2.sum_rate + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-0.95, 0.95), st.floats(1.0, 4.0))
def test_dpc_never_beats_superposition(a, b, rho, lam):
    T = a * a + b * b + 2 * a * b * rho
    if T > BC.P or T <= 1e-9:
        return
    sup = _sup_cache(lam)
    assert float(dpc_weighted(BC, 1.0, lam, T, rho, _angle(a, b, rho, T))) <= sup + 1e-8


_SUP = {}


def _sup_cache(lam):
    key = round(lam, 12)
    if key not in _SUP:
        _SUP[key] = scalar_superposition_max(BC, 1.0, lam)[0]
    return _SUP[key]


def _angle(a, b, rho, T):
    # invert the ellipse parameterisation a = s(u + v), b = s(u - v)
    s = np.sqrt(T / 2)
    u, v = (a + b) / (2 * s), (a - b) / (2 * s)
    return np.arctan2(v * np.sqrt(1 - rho), u * np.sqrt(1 + rho))


def test_dpc_gap_golden_interior_value():
    g = dpc_gap(BC, 1.2)
    assert g.interior
    assert g.superposition_bits == pytest.approx(
        oracles.gaussian_split_brute(1, 2, 10, 0.8, 0.3, 1.2), abs=1e-6)
    assert g.gap_bits == pytest.approx(0.0205009, abs=1e-6)


def test_dpc_gap_zero_at_corner_and_fixed_channel():
    assert dpc_gap(BC, 2.0).gap_bits == pytest.approx(0.0, abs=1e-9)
    fixed = GaussianBC.scalar(1.0, 2.0, 10.0, 1.0, 0.0)
    for lam in (1.1, 1.5, 3.0):
        assert dpc_gap(fixed, lam).gap_bits == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(ModelError):
        dpc_gap(BC, 1.0)


# -- sampling harness -----------------------------------------------------------

def test_jackknife_matches_iid_standard_error():
    x = np.random.default_rng(0).normal(size=100_000)
    m, se = jackknife(x)
    assert abs(m) < 4 * se
    assert se == pytest.approx(1 / np.sqrt(len(x)), rel=0.25)


def test_binary_antipodal_estimate_matches_quadrature():
    amp = 1.5
    strat = DiscreteStrategy(np.array([1.0]), np.array([-amp, amp]), np.array([[0.5, 0.5]]))
    rng = np.random.default_rng(3)
    m, se = jackknife(strategy_samples(BC, strat, 2.0, 200_000, rng))
    exact = 0.8 * oracles.bpsk_mi_bits(amp, 1.0) + 0.2 * oracles.bpsk_mi_bits(amp, 2.0)
    assert abs(m / LN2 - exact) < 4 * se / LN2


def test_dominance_check_finds_no_exceedance():
    res = gaussian_dominance_check(BC, 1.5, strategies=10, samples=20_000, seed=1)
    assert res.exceedances == 0
    assert np.all(res.estimates_bits <= res.gaussian_bits + 3 * res.stderr_bits)
