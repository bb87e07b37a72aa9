"""Marton sum rate for binary-input channels via randomized time division:
a time-sharing variable W with five cells, each cell serving one receiver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvariantError, ModelError
from ..state import StateBC, conditional_mi

N_CELLS = 5


@dataclass(frozen=True)
class MartonRTDParams:
    """Cell weights, split (cells < split serve receiver 1) and P(X=1 | W=j)."""

    weights: np.ndarray
    split: int
    cell_inputs: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, float)
        if w.shape != (N_CELLS,) or np.any(w < -1e-12) or abs(w.sum() - 1) > 1e-9:
            raise InvariantError("cell weights must be a pmf over five cells")
        if not 0 <= self.split <= N_CELLS:
            raise InvariantError("split index out of range")
        x = np.asarray(self.cell_inputs, float)
        if x.shape != (N_CELLS,) or np.any((x < 0) | (x > 1)):
            raise InvariantError("cell inputs must be five Bernoulli parameters")

    def to_dict(self) -> dict:
        return {
            "weights": np.asarray(self.weights).tolist(),
            "split": int(self.split),
            "cell_inputs": np.asarray(self.cell_inputs).tolist(),
        }


def _bern(x):
    x = np.asarray(x, float)
    return np.stack([1 - x, x], axis=-1)


def rtd_sum_rate(bc: StateBC, weights, cell_inputs, split) -> np.ndarray:
    """Sum-rate bound for batches of (weights (B,5), cell_inputs (B,5), split (B,) or int)."""
    b = np.atleast_2d(np.asarray(weights, float))
    x = np.atleast_2d(np.asarray(cell_inputs, float))
    i1 = conditional_mi(bc, 1, _bern(x))
    i2 = conditional_mi(bc, 2, _bern(x))
    xbar = np.sum(b * x, axis=1)
    w1 = conditional_mi(bc, 1, _bern(xbar)) - np.sum(b * i1, axis=1)
    w2 = conditional_mi(bc, 2, _bern(xbar)) - np.sum(b * i2, axis=1)
    first = np.arange(N_CELLS)[None, :] < np.reshape(split, (-1, 1))
    private = np.sum(b * np.where(first, i1, i2), axis=1)
    return np.minimum(w1, w2) + private


class _Ascent:
    def __init__(self, bc, step, tol):
        self.bc, self.tol = bc, tol
        self.grid = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
        self.fine = np.linspace(-step, step, 21)
        self.moves = np.linspace(0.0, 1.0, 101)

    def value(self, b, x, k):
        return rtd_sum_rate(self.bc, b, x, k)

    def _take(self, bs, xs, ks, cur):
        vals = self.value(bs, xs, ks)
        j = int(np.argmax(vals))
        if vals[j] > cur[0] + self.tol * 1e-3:
            return bs[j], xs[j], int(np.broadcast_to(ks, (len(vals),))[j]), float(vals[j])
        return None

    def epoch(self, b, x, k, cur):
        state = [cur, b, x, k]

        def update(res):
            if res is not None:
                state[1], state[2], state[3], state[0] = res

        # split index
        ks = np.arange(N_CELLS + 1)
        update(self._take(np.repeat(state[1][None], len(ks), 0),
                          np.repeat(state[2][None], len(ks), 0), ks, state))
        for w in range(N_CELLS):
            for cands in (self.grid, np.clip(state[2][w] + self.fine, 0, 1)):
                xs = np.repeat(state[2][None], len(cands), 0)
                xs[:, w] = cands
                update(self._take(np.repeat(state[1][None], len(cands), 0), xs, state[3], state))
        for i in range(N_CELLS):
            for j in range(N_CELLS):
                if i == j or state[1][i] <= 0:
                    continue
                bs = np.repeat(state[1][None], len(self.moves), 0)
                amt = self.moves * state[1][i]
                bs[:, i] -= amt
                bs[:, j] += amt
                bs = np.clip(bs, 0.0, None)
                update(self._take(bs, np.repeat(state[2][None], len(bs), 0), state[3], state))
        return state[1], state[2], state[3], state[0]


def marton_rtd_sumrate(
    bc: StateBC,
    restarts: int = 64,
    seed: int = 0,
    tol: float = 1e-7,
    polish_step: float = 1e-3,
    max_epochs: int = 200,
) -> tuple[float, MartonRTDParams]:
    """Maximise the randomized time-division sum rate by multi-start coordinate ascent.

    Restarts are stratified over the split index and seeded from ``seed``;
    each runs epochs over the split, every cell input (grid at
    ``polish_step`` then a finer local patch) and pairwise weight transfers,
    until an epoch gains less than ``tol``.
    """
    if bc.input_size != 2:
        raise ModelError("randomized time division is implemented for binary inputs only")
    rng = np.random.default_rng(seed)
    asc = _Ascent(bc, polish_step, tol)
    best_val, best = -np.inf, None
    for r in range(restarts):
        b = rng.dirichlet(np.ones(N_CELLS))
        x = rng.uniform(0, 1, N_CELLS)
        k = r % (N_CELLS + 1)
        cur = float(asc.value(b, x, k)[0])
        for _ in range(max_epochs):
            b, x, k, new = asc.epoch(b, x, k, cur)
            gain, cur = new - cur, new
            if gain < tol:
                break
        if cur > best_val + 1e-12:
            best_val, best = cur, (b, x, k)
    b, x, k = best
    b = np.clip(b, 0, None)
    b = b / b.sum()
    value = float(asc.value(b, x, k)[0])
    return value, MartonRTDParams(b, int(k), np.clip(x, 0, 1))
