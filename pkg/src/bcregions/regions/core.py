"""Rate-region containers, direction sweeps and small planar geometry helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..errors import InvariantError

VERTEX_TOL = 1e-8


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float
    r0: float | None = None

    def __post_init__(self):
        for v in (self.r0, self.r1, self.r2):
            if v is not None and v < -1e-9:
                raise InvariantError(f"negative rate in {self}")

    def as_array(self) -> np.ndarray:
        if self.r0 is None:
            return np.array([self.r1, self.r2])
        return np.array([self.r0, self.r1, self.r2])


@dataclass
class Support:
    """One sample of a region's support function.

    ``direction`` is (lambda1, lambda2) or (lambda0, lambda1, lambda2);
    ``value`` is the max weighted sum in bits, attained at ``point`` when the
    region is an inner bound (outer-bound supports carry no point).
    """

    direction: tuple[float, ...]
    value: float
    point: RatePoint | None = None
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class RateRegion:
    supports: list[Support]
    vertices: np.ndarray
    kind: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    def support(self, direction) -> float:
        """Support of the vertex polygon in ``direction``."""
        return float(np.max(self.vertices @ np.asarray(direction, float)))

    def validate(self, tol: float = VERTEX_TOL) -> None:
        validate_region(self, tol)


def validate_region(region: RateRegion, tol: float = VERTEX_TOL) -> None:
    """Raise InvariantError unless vertices sit under every support hyperplane
    and each achieving point attains its support."""
    verts = np.asarray(region.vertices, float)
    if verts.size and np.any(verts < -tol):
        raise InvariantError("region has a vertex with a negative rate")
    for s in region.supports:
        d = np.asarray(s.direction, float)
        if verts.size and d.size == verts.shape[1]:
            excess = float(np.max(verts @ d)) - s.value
            if excess > tol * max(1.0, abs(s.value)):
                raise InvariantError(
                    f"vertex exceeds support in direction {s.direction} by {excess:.3g}"
                )
        if s.point is not None:
            got = float(s.point.as_array() @ d)
            if abs(got - s.value) > 1e-6 * max(1.0, abs(s.value)):
                raise InvariantError(
                    f"achieving point gives {got} but support is {s.value} at {s.direction}"
                )


def lambda_sweep(
    n: int = 60, lo: float = 1 / 32, hi: float = 32.0, breakpoints: Sequence[float] = ()
) -> np.ndarray:
    """Log-spaced weights lambda for directions (1, lambda), plus breakpoints."""
    if not lo < hi:
        raise ValueError("sweep needs lo < hi")
    lams = np.geomspace(lo, hi, n) if n > 1 else np.array([lo])
    extra = [b for b in breakpoints if np.isfinite(b) and b > 0]
    return np.unique(np.concatenate([lams, extra]))


def weight_breakpoints(p1: float, p2: float) -> list[float]:
    """Weights lambda at which the best coding scheme can switch for state
    probabilities (p1, p2): 1, (1-p1)/(1-p2) and p1/p2."""
    out = [1.0]
    if p2 < 1:
        out.append((1 - p1) / (1 - p2))
    if p2 > 0:
        out.append(p1 / p2)
    return out


def directions_from_lambdas(lams) -> list[tuple[float, float]]:
    return [(1.0, float(l)) for l in lams]


def pentagon_support(a, b, s, w1: float, w2: float):
    """max w1 R1 + w2 R2 over {0 <= R1 <= a, 0 <= R2 <= b, R1 + R2 <= s}.

    Vectorised over arrays a, b, s; returns (value, r1, r2).
    """
    a, b, s = np.broadcast_arrays(*(np.maximum(np.asarray(x, float), 0.0) for x in (a, b, s)))
    a_, b_ = np.minimum(a, s), np.minimum(b, s)
    cands_r1 = np.stack([a_, np.zeros_like(a), a_, np.clip(s - b_, 0.0, a_)])
    cands_r2 = np.stack([np.zeros_like(a), b_, np.clip(s - a_, 0.0, b_), b_])
    vals = w1 * cands_r1 + w2 * cands_r2
    k = np.argmax(vals, axis=0)
    idx = np.indices(k.shape)
    return (
        vals[(k, *idx)],
        cands_r1[(k, *idx)],
        cands_r2[(k, *idx)],
    )


def upper_right_hull(points, tol: float = 1e-10) -> np.ndarray:
    """Vertices of the convex hull of the down-closure of ``points`` in the
    nonnegative quadrant, counter-clockwise from the origin."""
    pts = np.asarray(points, float).reshape(-1, 2)
    pts = np.maximum(pts, 0.0)
    if pts.size == 0:
        return np.zeros((1, 2))
    r1max, r2max = pts[:, 0].max(), pts[:, 1].max()
    pts = np.vstack([pts, [[0.0, 0.0], [r1max, 0.0], [0.0, r2max]]])
    return convex_hull_2d(pts, tol)


def convex_hull_2d(points, tol: float = 1e-10) -> np.ndarray:
    """Monotone-chain hull; drops vertices within ``tol`` of collinear."""
    pts = np.unique(np.asarray(points, float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def chain(seq):
        out: list[np.ndarray] = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
                scale = max(1.0, np.hypot(*(p - o)))
                if cross <= tol * scale:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    # rotate so the vertex closest to the origin comes first
    start = int(np.argmin(np.hypot(hull[:, 0], hull[:, 1])))
    return np.roll(hull, -start, axis=0)


def clip_halfplane(poly: np.ndarray, normal, offset: float) -> np.ndarray:
    """Clip a convex polygon (ccw vertices) to {x : normal . x <= offset}."""
    n = np.asarray(normal, float)
    out = []
    m = len(poly)
    for i in range(m):
        cur, nxt = poly[i], poly[(i + 1) % m]
        fc, fn = cur @ n - offset, nxt @ n - offset
        if fc <= 1e-15:
            out.append(cur)
        if (fc < 0 < fn) or (fn < 0 < fc):
            t = fc / (fc - fn)
            out.append(cur + t * (nxt - cur))
    if not out:
        return np.zeros((0, 2))
    return convex_hull_2d(np.array(out))


def supports_from_vertices(vertices: np.ndarray, directions, params=None) -> list[Support]:
    out = []
    for d in directions:
        d = tuple(float(x) for x in d)
        vals = vertices @ np.asarray(d)
        k = int(np.argmax(vals))
        r1, r2 = (float(max(v, 0.0)) for v in vertices[k])
        out.append(Support(d, float(vals[k]), RatePoint(r1, r2), dict(params or {})))
    return out
