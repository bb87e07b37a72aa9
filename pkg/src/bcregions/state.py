"""Broadcast channels whose per-receiver channel is drawn from a list of
state components, with the state known only at the receivers.

Receiver j sees component i with probability ``p_j[i]``; since the
receiver knows the state, its effective output is the pair (Y_j, S).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .prob import as_channel, as_pmf, mutual_information


def bsc(p: float) -> np.ndarray:
    return np.array([[1.0 - p, p], [p, 1.0 - p]])


def bec(e: float) -> np.ndarray:
    """Binary erasure channel; outputs ordered (0, erasure, 1)."""
    return np.array([[1.0 - e, e, 0.0], [0.0, e, 1.0 - e]])


def z_channel(p: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [p, 1.0 - p]])


def deterministic_channel(outputs, n_outputs: int | None = None) -> np.ndarray:
    """0/1 matrix of the map x -> outputs[x]."""
    outputs = np.asarray(outputs, dtype=int)
    if outputs.ndim != 1 or np.any(outputs < 0):
        raise ModelError("deterministic map must be a list of non-negative output indices")
    n = int(outputs.max()) + 1 if n_outputs is None else n_outputs
    w = np.zeros((outputs.size, n))
    w[np.arange(outputs.size), outputs] = 1.0
    return w


def _two_point(p) -> np.ndarray:
    if np.ndim(p) == 0:
        return as_pmf([float(p), 1.0 - float(p)])
    return as_pmf(p)


@dataclass(frozen=True)
class StateBC:
    """Components p(y~_i|x), i = 1..k, plus each receiver's state pmf."""

    components: tuple[np.ndarray, ...]
    p1: np.ndarray
    p2: np.ndarray
    swapped: bool = field(default=False, compare=False)

    def __post_init__(self):
        comps = tuple(as_channel(w) for w in self.components)
        if len(comps) < 2:
            raise ModelError("a state broadcast channel needs at least two components")
        n_in = {w.shape[0] for w in comps}
        if len(n_in) != 1:
            raise ModelError(f"components disagree on input alphabet size: {sorted(n_in)}")
        p1, p2 = as_pmf(self.p1), as_pmf(self.p2)
        if not (p1.size == p2.size == len(comps)):
            raise ModelError("state pmfs must have one entry per component")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def two_component(cls, w1, w2, p1, p2) -> "StateBC":
        """Two-component channel; receivers are relabelled so that p1(1) >= p2(1)."""
        a, b = _two_point(p1), _two_point(p2)
        if a[0] < b[0]:
            return cls((w1, w2), b, a, swapped=True)
        return cls((w1, w2), a, b)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def input_size(self) -> int:
        return self.components[0].shape[0]

    def state_pmf(self, receiver: int) -> np.ndarray:
        if receiver not in (1, 2):
            raise ValueError("receiver must be 1 or 2")
        return self.p1 if receiver == 1 else self.p2

    def swap_receivers(self) -> "StateBC":
        return StateBC(self.components, self.p2, self.p1, swapped=not self.swapped)


@dataclass(frozen=True)
class DeterministicPair:
    """Two deterministic components y~_1 = f1(x), y~_2 = f2(x)."""

    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        f1, f2 = np.asarray(self.f1, float), np.asarray(self.f2, float)
        for f in (f1, f2):
            if f.ndim != 2 or not np.all((f == 0) | (f == 1)) or np.any(f.sum(axis=1) != 1):
                raise ModelError("deterministic components must have exactly one 1 per row")
        if f1.shape[0] != f2.shape[0]:
            raise ModelError("f1 and f2 must share the input alphabet")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @classmethod
    def from_maps(cls, f1, f2) -> "DeterministicPair":
        return cls(deterministic_channel(f1), deterministic_channel(f2))

    @property
    def input_size(self) -> int:
        return self.f1.shape[0]

    def joint_channel(self) -> np.ndarray:
        """Deterministic channel x -> (f1(x), f2(x)) over the product alphabet."""
        n1, n2 = self.f1.shape[1], self.f2.shape[1]
        return np.einsum("xa,xb->xab", self.f1, self.f2).reshape(-1, n1 * n2)

    def to_state_bc(self, p1, p2) -> StateBC:
        return StateBC.two_component(self.f1, self.f2, p1, p2)


def blackwell_pair() -> DeterministicPair:
    """Blackwell functions on X = {0, 1, 2}: f1 flags X=0, f2 flags X=1."""
    return DeterministicPair.from_maps([0, 1, 1], [0, 1, 0])


def lift_state_channel(bc: StateBC, receiver: int) -> np.ndarray:
    """Channel x -> (y, s) with one disjoint output block per state."""
    ps = bc.state_pmf(receiver)
    return np.hstack([p * w for p, w in zip(ps, bc.components)])


def conditional_mi(bc: StateBC, receiver: int, px) -> float | np.ndarray:
    """I(X; Y_j | S) = sum_i p_j(i) I(X; Y~_i); vectorised over leading axes of ``px``."""
    ps = bc.state_pmf(receiver)
    px = np.asarray(px, float)
    if px.shape[-1] != bc.input_size:
        raise ModelError(f"input pmf length {px.shape[-1]} != input alphabet {bc.input_size}")
    total = 0.0
    for p, w in zip(ps, bc.components):
        if p > 0:
            total = total + p * mutual_information(px, w)
    return float(total) if np.ndim(total) == 0 else total


def component_mis(bc: StateBC, px) -> np.ndarray:
    """I(X; Y~_i) for each component i, stacked on the last axis."""
    px = np.asarray(px, float)
    return np.stack([np.asarray(mutual_information(px, w)) for w in bc.components], axis=-1)
