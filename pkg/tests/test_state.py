import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcregions.errors import ModelError
from bcregions.prob import mutual_information
from bcregions.state import (
    DeterministicPair,
    StateBC,
    bec,
    blackwell_pair,
    bsc,
    component_mis,
    conditional_mi,
    lift_state_channel,
    z_channel,
)


def test_two_component_relabels_receivers():
    bc = StateBC.two_component(bsc(0.1), bsc(0.3), 0.2, 0.6)
    assert bc.swapped
    assert bc.p1[0] == pytest.approx(0.6) and bc.p2[0] == pytest.approx(0.2)


def test_components_must_share_input_alphabet():
    with pytest.raises(ModelError):
        StateBC((bsc(0.1), np.ones((3, 1))), [0.5, 0.5], [0.5, 0.5])
    with pytest.raises(ModelError):
        StateBC((bsc(0.1),), [1.0], [1.0])


def test_deterministic_pair_validation():
    with pytest.raises(ModelError):
        DeterministicPair(np.array([[0.5, 0.5]]), np.array([[1.0, 0.0]]))
    det = blackwell_pair()
    assert det.joint_channel().shape == (3, 4)
    assert np.array_equal(det.f1.argmax(1), [0, 1, 1])
    assert np.array_equal(det.f2.argmax(1), [0, 1, 0])


def test_lifted_channel_rows_are_stochastic():
    bc = StateBC((bsc(0.1), bec(0.4), z_channel(0.2)[:, [0, 1, 1]] * [1, 0.5, 0.5]),
                 [0.2, 0.5, 0.3], [0.6, 0.1, 0.3])
    for r in (1, 2):
        assert np.allclose(lift_state_channel(bc, r).sum(axis=1), 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_state_mixture_identity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    comps = tuple(rng.dirichlet(np.ones(3), size=2) for _ in range(k))
    bc = StateBC(comps, rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k)))
    px = rng.dirichlet(np.ones(2))
    for r in (1, 2):
        lifted = mutual_information(px, lift_state_channel(bc, r))
        assert conditional_mi(bc, r, px) == pytest.approx(lifted, abs=1e-10)
        assert conditional_mi(bc, r, px) == pytest.approx(
            bc.state_pmf(r) @ component_mis(bc, px), abs=1e-10
        )


def test_conditional_mi_is_vectorised():
    bc = StateBC.two_component(bsc(0.1), bsc(0.2), 0.7, 0.3)
    pts = np.array([[0.5, 0.5], [0.2, 0.8]])
    out = conditional_mi(bc, 1, pts)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(conditional_mi(bc, 1, pts[0]))
