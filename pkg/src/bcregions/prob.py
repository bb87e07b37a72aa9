"""Finite-alphabet probability kernel: entropies, mutual information,
simplex grids and upper concave envelopes.

Pmfs and channel matrices are plain numpy arrays; ``as_pmf`` and
``as_channel`` validate and normalise them. All logarithms are base 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import ModelError, UnsupportedSizeError

PMF_TOL = 1e-9


def as_pmf(weights, tol: float = PMF_TOL) -> np.ndarray:
    """Validate a probability vector and renormalise it exactly."""
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ModelError(f"pmf must be a non-empty vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < -tol):
        raise ModelError(f"pmf has negative or non-finite entries: {p}")
    if abs(p.sum() - 1.0) > tol:
        raise ModelError(f"pmf sums to {p.sum():.12g}, not 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def as_channel(matrix, tol: float = PMF_TOL) -> np.ndarray:
    """Validate a row-stochastic matrix p(y|x) (rows indexed by x)."""
    w = np.asarray(matrix, dtype=float)
    if w.ndim != 2 or 0 in w.shape:
        raise ModelError(f"channel must be a non-empty matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < -tol):
        raise ModelError("channel has negative or non-finite entries")
    sums = w.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise ModelError(f"channel rows do not sum to 1: {sums}")
    w = np.clip(w, 0.0, None)
    return w / w.sum(axis=1, keepdims=True)


def entropy(p) -> float | np.ndarray:
    """Entropy in bits along the last axis, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    out = terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def binary_entropy(x) -> float | np.ndarray:
    x = np.asarray(x, dtype=float)
    return entropy(np.stack([x, 1.0 - x], axis=-1))


def bconv(a, b):
    """Binary convolution a*b = a(1-b) + b(1-a)."""
    return a * (1.0 - b) + b * (1.0 - a)


def mutual_information(px, channel) -> float | np.ndarray:
    """I(X;Y) in bits for input pmf(s) ``px`` (shape (..., |X|)) through ``channel``."""
    px = np.asarray(px, dtype=float)
    w = np.asarray(channel, dtype=float)
    if px.shape[-1] != w.shape[0]:
        raise ModelError(
            f"input pmf has {px.shape[-1]} symbols but channel has {w.shape[0]} rows"
        )
    out = entropy(px @ w) - px @ entropy(w)
    out = np.maximum(out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def simplex_grid(dim: int, resolution: int) -> np.ndarray:
    """All pmfs (k_1, ..., k_dim) / resolution, in lexicographic order of k."""
    if dim < 1 or resolution < 1:
        raise ValueError("dim and resolution must be positive")
    if dim == 1:
        return np.ones((1, 1))
    # stars and bars: choose dim-1 bar positions among resolution+dim-1 slots
    rows = []
    n = resolution + dim - 1
    for bars in combinations(range(n), dim - 1):
        edges = (-1,) + bars + (n,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(dim)])
    return np.array(rows, dtype=float) / resolution


def _local_simplex_grid(center: np.ndarray, radius: float, steps: int) -> np.ndarray:
    """Points of a fine lattice inside the simplex within ``radius`` of ``center``."""
    d = center.size
    offsets = np.linspace(-radius, radius, 2 * steps + 1)
    free = np.stack(np.meshgrid(*([offsets] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1)
    pts = np.empty((free.shape[0], d))
    pts[:, 1:] = center[1:] + free
    pts[:, 0] = 1.0 - pts[:, 1:].sum(axis=1)
    ok = np.all(pts >= -1e-12, axis=1)
    return np.clip(pts[ok], 0.0, 1.0)


def refined_grid(dim: int, resolution: int, center, factor: int = 10) -> np.ndarray:
    """Coarse grid plus a ``factor``-times finer patch around ``center``."""
    coarse = simplex_grid(dim, resolution)
    if dim == 1:
        return coarse
    fine = _local_simplex_grid(np.asarray(center, float), 1.0 / resolution, factor)
    pts = np.vstack([coarse, fine])
    pts = np.round(pts, 12)
    pts[:, 0] = 1.0 - pts[:, 1:].sum(axis=1)
    return np.unique(pts, axis=0)


def default_resolution(dim: int) -> int:
    return {1: 1, 2: 400, 3: 100}.get(dim, 40)


def maximize_on_simplex(
    objective: Callable[[np.ndarray], np.ndarray],
    dim: int,
    resolution: int | None = None,
    refine: bool = True,
) -> tuple[np.ndarray, float, np.ndarray, int]:
    """Grid-maximise ``objective`` over the probability simplex.

    ``objective`` maps an (N, dim) array of sample pmfs to N values; it sees
    the whole sample set, so it may depend on all samples (as envelope-based
    objectives do). One refinement pass adds a 10x finer patch around the
    coarse argmax. Returns (argmax pmf, max value, samples, argmax index).
    """
    resolution = resolution or default_resolution(dim)
    pts = simplex_grid(dim, resolution)
    vals = np.asarray(objective(pts), float)
    best = int(np.argmax(vals))
    if refine and dim > 1:
        pts = refined_grid(dim, resolution, pts[best])
        vals = np.asarray(objective(pts), float)
        best = int(np.argmax(vals))
    return pts[best], float(vals[best]), pts, best


@dataclass(frozen=True)
class EnvelopeResult:
    value: float
    mixture: tuple[tuple[float, np.ndarray], ...]

    @property
    def barycenter(self) -> np.ndarray:
        return sum(w * p for w, p in self.mixture)


class ConcaveEnvelope:
    """Upper concave envelope of a function sampled on the simplex.

    Binary alphabets use a monotone-chain upper hull over P(X=1); ternary
    alphabets use the upper facets of the lifted 3-D convex hull. Larger
    alphabets are rejected.
    """

    def __init__(self, points, values):
        pts = np.asarray(points, dtype=float)
        vals = np.asarray(values, dtype=float)
        if pts.ndim != 2 or pts.shape[0] != vals.shape[0]:
            raise ValueError("points must be (N, d) with one value per point")
        self.dim = pts.shape[1]
        if self.dim not in (2, 3):
            raise UnsupportedSizeError(
                f"concave envelope supports alphabet sizes 2 and 3, got {self.dim}"
            )
        self.points = pts
        self.values = vals
        if self.dim == 2:
            self._build_1d()
        else:
            self._build_2d()

    # -- binary alphabet ----------------------------------------------------
    def _build_1d(self):
        x = self.points[:, 1]
        order = np.lexsort((-self.values, x))
        xs, ys = x[order], self.values[order]
        keep = np.r_[True, np.diff(xs) > 0]
        xs, ys = xs[keep], ys[keep]
        hx: list[float] = []
        hy: list[float] = []
        for xi, yi in zip(xs, ys):
            while len(hx) >= 2:
                cross = (hx[-1] - hx[-2]) * (yi - hy[-2]) - (hy[-1] - hy[-2]) * (xi - hx[-2])
                if cross >= 0:
                    hx.pop()
                    hy.pop()
                else:
                    break
            hx.append(xi)
            hy.append(yi)
        self._hx = np.array(hx)
        self._hy = np.array(hy)

    # -- ternary alphabet ---------------------------------------------------
    def _build_2d(self):
        xy = self.points[:, 1:]
        z = self.values
        design = np.column_stack([xy, np.ones(len(z))])
        coef, *_ = np.linalg.lstsq(design, z, rcond=None)
        scale = max(1.0, float(np.max(np.abs(z))))
        if np.max(np.abs(design @ coef - z)) <= 1e-12 * scale:
            self._affine = coef
            return
        self._affine = None
        try:
            hull = ConvexHull(np.column_stack([xy, z]))
        except QhullError:
            self._affine = coef
            return
        eq = hull.equations
        upper = eq[:, 2] > 1e-12
        eq = eq[upper]
        # plane: z = a x + b y + c
        self._planes = np.column_stack(
            [-eq[:, 0] / eq[:, 2], -eq[:, 1] / eq[:, 2], -eq[:, 3] / eq[:, 2]]
        )
        self._simplices = hull.simplices[upper]
        self._vertices = np.zeros(len(z), dtype=bool)
        self._vertices[np.unique(self._simplices)] = True
        self._xy = xy

    def _facet_values(self, q_xy: np.ndarray, chunk: int = 2048):
        vals = np.empty(len(q_xy))
        idx = np.empty(len(q_xy), dtype=int)
        aug = np.column_stack([q_xy, np.ones(len(q_xy))])
        for s in range(0, len(q_xy), chunk):
            m = aug[s : s + chunk] @ self._planes.T
            idx[s : s + chunk] = np.argmin(m, axis=1)
            vals[s : s + chunk] = m[np.arange(m.shape[0]), idx[s : s + chunk]]
        return vals, idx

    def evaluate(self, queries) -> np.ndarray:
        q = np.atleast_2d(np.asarray(queries, dtype=float))
        if self.dim == 2:
            x = q[:, 1]
            if np.any(x < self._hx[0] - 1e-12) or np.any(x > self._hx[-1] + 1e-12):
                raise ValueError("query outside the sampled hull")
            return np.interp(x, self._hx, self._hy)
        if self._affine is not None:
            return np.column_stack([q[:, 1:], np.ones(len(q))]) @ self._affine
        vals, _ = self._facet_values(q[:, 1:])
        return vals

    def at_samples(self) -> np.ndarray:
        """Envelope evaluated at every sample point."""
        if self.dim == 2 or self._affine is not None:
            return np.maximum(self.evaluate(self.points), self.values)
        out = self.values.copy()
        rest = ~self._vertices
        if rest.any():
            out[rest] = np.maximum(self._facet_values(self._xy[rest])[0], self.values[rest])
        return out

    def query(self, q) -> EnvelopeResult:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,):
            raise ValueError(f"query must be a pmf of length {self.dim}")
        if self.dim == 2:
            x = q[1]
            hx, hy = self._hx, self._hy
            if x < hx[0] - 1e-12 or x > hx[-1] + 1e-12:
                raise ValueError("query outside the sampled hull")
            j = int(np.searchsorted(hx, x))
            if j < len(hx) and abs(hx[j] - x) <= 1e-15:
                return EnvelopeResult(float(hy[j]), ((1.0, _bern(hx[j])),))
            j = min(max(j, 1), len(hx) - 1)
            t = (x - hx[j - 1]) / (hx[j] - hx[j - 1])
            value = (1 - t) * hy[j - 1] + t * hy[j]
            return EnvelopeResult(
                float(value), ((1.0 - t, _bern(hx[j - 1])), (t, _bern(hx[j])))
            )
        if self._affine is not None:
            value = float(np.r_[q[1:], 1.0] @ self._affine)
            return EnvelopeResult(value, ((1.0, q.copy()),))
        vals, idx = self._facet_values(q[None, 1:])
        tri = self._simplices[idx[0]]
        corners = self._xy[tri]
        mat = np.vstack([corners.T, np.ones(3)])
        bary = np.linalg.solve(mat, np.r_[q[1:], 1.0])
        if np.any(bary < -1e-9):
            raise ValueError("query outside the sampled hull")
        bary = np.clip(bary, 0.0, None)
        bary /= bary.sum()
        mix = tuple((float(w), self.points[i].copy()) for w, i in zip(bary, tri) if w > 1e-15)
        value = float(sum(w * self.values[i] for w, i in zip(bary, tri)))
        return EnvelopeResult(value, mix)


def _bern(x: float) -> np.ndarray:
    return np.array([1.0 - x, x])


def upper_concave_envelope(
    samples: Sequence[tuple[Sequence[float], float]] | tuple[np.ndarray, np.ndarray],
    query,
) -> EnvelopeResult:
    """Envelope value and achieving mixture at ``query``.

    ``samples`` is either a sequence of (pmf, value) pairs or a
    ``(points, values)`` pair of arrays.
    """
    if isinstance(samples, tuple) and len(samples) == 2 and np.ndim(samples[0]) == 2:
        points, values = samples
    else:
        points = np.array([p for p, _ in samples], dtype=float)
        values = np.array([v for _, v in samples], dtype=float)
    return ConcaveEnvelope(points, values).query(query)
