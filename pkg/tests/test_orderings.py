import numpy as np
import pytest

from bcregions.errors import InvariantError, ModelError
from bcregions.orderings import (
    NotCSymmetricError,
    OrderingReport,
    bsc_bec_thresholds,
    bsc_bec_verdicts,
    c_symmetry_permutations,
    degradation_residual,
    is_degraded,
    is_dominantly_c_symmetric,
    is_less_noisy,
    is_more_capable,
    ordering_report,
    product_transfer_check,
    transfer_check,
)
from bcregions.prob import binary_entropy
from bcregions.state import StateBC, bec, bsc, lift_state_channel, z_channel


def test_bsc_pair_is_degraded_with_witness():
    ok, q = is_degraded(bsc(0.1), bsc(0.3))
    assert ok
    assert degradation_residual(bsc(0.1), bsc(0.3), q) < 1e-9
    # crossover composition: 0.1 * b = 0.3 -> b = 0.25
    assert np.allclose(q, bsc(0.25), atol=1e-7)


def test_bsc_pair_is_not_degraded_in_reverse():
    ok, q = is_degraded(bsc(0.3), bsc(0.1))
    assert not ok and q is None


@pytest.mark.parametrize("p,e", [(0.1, 0.15), (0.2, 0.3)])
def test_bec_bsc_degraded_below_twice_crossover(p, e):
    assert e < 2 * p
    assert is_degraded(bec(e), bsc(p))[0]


@pytest.mark.parametrize("p,e", [(0.1, 0.3), (0.1, 0.25)])
def test_bec_bsc_less_noisy_band(p, e):
    # 2p < e < 4p(1-p): less noisy but not degraded
    assert 2 * p < e < 4 * p * (1 - p)
    assert not is_degraded(bec(e), bsc(p))[0]
    assert is_less_noisy(bec(e), bsc(p))[0]


def test_bec_bsc_more_capable_band():
    p, e = 0.1, 0.45
    assert 4 * p * (1 - p) < e < binary_entropy(p)
    assert not is_less_noisy(bec(e), bsc(p))[0]
    assert is_more_capable(bec(e), bsc(p))[0]


def test_bec_bsc_dominant_c_symmetry_above_entropy():
    p, e = 0.1, 0.6
    assert e > binary_entropy(p)
    assert not is_more_capable(bec(e), bsc(p))[0]
    assert is_dominantly_c_symmetric(bsc(p), bec(e))


def test_thresholds_are_ordered():
    for p in np.linspace(0.01, 0.49, 20):
        t = bsc_bec_thresholds(p)
        assert t["degraded"] <= t["less_noisy"] + 1e-12 <= t["more_capable"] + 2e-12


def test_verdicts_far_from_thresholds():
    v = bsc_bec_verdicts(0.25, 0.05)
    assert all(v[k] for k in ("degraded", "less_noisy", "more_capable"))
    assert not v["dominantly_c_symmetric"]


def test_c_symmetry_of_bsc_and_bec():
    assert c_symmetry_permutations(bsc(0.2)) is not None
    perms = c_symmetry_permutations(bec(0.3))
    assert perms is not None and list(perms[1]) == [2, 1, 0]
    assert c_symmetry_permutations(z_channel(0.3)) is None


def test_dominant_c_symmetry_requires_c_symmetric_channels():
    with pytest.raises(NotCSymmetricError):
        is_dominantly_c_symmetric(z_channel(0.3), bsc(0.2))
    assert issubclass(NotCSymmetricError, ModelError)


def test_report_refuses_broken_chain():
    with pytest.raises(InvariantError):
        OrderingReport(True, False, True, False, False)


def test_random_pairs_keep_the_chain():
    rng = np.random.default_rng(11)
    for _ in range(15):
        n = int(rng.integers(2, 4))
        w1 = rng.dirichlet(np.ones(3), size=n)
        q = rng.dirichlet(np.ones(2), size=3)
        w2 = w1 @ q if rng.random() < 0.5 else rng.dirichlet(np.ones(2), size=n)
        rep = ordering_report(w1, w2, resolution=60 if n == 3 else None)
        assert not (rep.degraded and not rep.less_noisy)


def test_lifted_pair_inherits_degradedness():
    bc = StateBC.two_component(bsc(0.1), bsc(0.3), 0.8, 0.3)
    rep = transfer_check(bc)
    assert rep.degraded and rep.less_noisy and rep.more_capable


def test_transfer_requires_labelling():
    bc = StateBC((bsc(0.1), bsc(0.3)), [0.2, 0.8], [0.7, 0.3])
    with pytest.raises(ModelError):
        transfer_check(bc)


def test_less_noisy_transfer_holds_both_ways():
    rng = np.random.default_rng(4)
    for _ in range(6):
        w1 = rng.dirichlet(np.ones(2), size=2)
        w2 = rng.dirichlet(np.ones(2), size=2)
        bc = StateBC((w1, w2), [0.8, 0.2], [0.3, 0.7])
        comp = is_less_noisy(w1, w2)[0]
        lifted = is_less_noisy(lift_state_channel(bc, 1), lift_state_channel(bc, 2))[0]
        assert comp == lifted


def test_more_capable_transfer_for_bec_bsc_pair():
    bc = StateBC.two_component(bec(0.45), bsc(0.1), 0.9, 0.2)
    rep = transfer_check(bc)
    assert rep.more_capable and not rep.degraded


def test_product_of_reversely_more_capable_components():
    a = StateBC((bsc(0.05), bsc(0.2)), [0.9, 0.1], [0.4, 0.6])
    b = StateBC((bsc(0.3), bsc(0.1)), [0.7, 0.3], [0.2, 0.8])
    assert product_transfer_check(a, b)
    with pytest.raises(ModelError):
        product_transfer_check(b, a)


def test_three_bsc_figure_instance_is_more_capable():
    alpha, p, q = (0.2, 0.3, 0.4), (1 / 3, 1 / 3, 1 / 3), (0.2, 0.3, 0.5)
    bc = StateBC(tuple(bsc(x) for x in alpha), p, q)
    w1, w2 = lift_state_channel(bc, 1), lift_state_channel(bc, 2)
    assert is_more_capable(w1, w2)[0] or is_dominantly_c_symmetric(w1, w2)


def test_dominant_c_symmetry_transfers_to_lifted_pair():
    p, e = 0.1, 0.6
    assert is_dominantly_c_symmetric(bsc(p), bec(e))
    rep = transfer_check(StateBC.two_component(bsc(p), bec(e), 0.8, 0.3))
    assert rep.c_symmetric and rep.dominantly_c_symmetric
    assert not rep.more_capable
