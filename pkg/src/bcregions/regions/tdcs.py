"""Regions for broadcast channels whose two state components are deterministic
maps of the input: private-message capacity, the Blackwell and finite-field
closed forms, and supports of the region with a common message."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import ModelError, UnsupportedSizeError
from ..prob import (
    _local_simplex_grid,
    binary_entropy,
    entropy,
    maximize_on_simplex,
    simplex_grid,
)
from ..state import DeterministicPair
from .core import (
    RatePoint,
    RateRegion,
    Support,
    directions_from_lambdas,
    lambda_sweep,
    pentagon_support,
    supports_from_vertices,
    weight_breakpoints,
    upper_right_hull,
)

MAX_DET_INPUT = 4


def _check_prob(name, p):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ModelError(f"{name} must lie in [0, 1], got {p}")
    return p


def default_directions(p1: float, p2: float, n: int = 60) -> list[tuple[float, float]]:
    return [(1.0, 0.0)] + directions_from_lambdas(
        lambda_sweep(n, breakpoints=weight_breakpoints(p1, p2))
    ) + [(0.0, 1.0)]


class _DetTerms:
    """Entropies of f1(X), f2(X) and their mutual information at sample pmfs."""

    def __init__(self, det: DeterministicPair, pts: np.ndarray):
        self.h1 = entropy(pts @ det.f1)
        self.h2 = entropy(pts @ det.f2)
        h12 = entropy(pts @ det.joint_channel())
        self.i12 = np.maximum(self.h1 + self.h2 - h12, 0.0)


# Auxiliary choices: (U1, U2) = (X, -), (f1, f2), (f2, f1), (-, X). The (f2, f1)
# choice is what (f1, f2) becomes after relabelling receivers when p1 < p2.
SCHEMES = ("X,0", "f1,f2", "f2,f1", "0,X")


def _scheme_triples(t: _DetTerms, p1: float, p2: float):
    """(a, b, s) pentagon bounds for every scheme; each has shape (4, N)."""
    q1, q2 = 1 - p1, 1 - p2
    c1 = p1 * t.h1 + q1 * t.h2
    c2 = p2 * t.h1 + q2 * t.h2
    zero = np.zeros_like(c1)
    a_ff = p1 * t.h1 + q1 * t.i12
    b_ff = p2 * t.i12 + q2 * t.h2
    a_rev = p1 * t.i12 + q1 * t.h2
    b_rev = p2 * t.h1 + q2 * t.i12
    a = np.stack([c1, a_ff, a_rev, zero])
    b = np.stack([zero, b_ff, b_rev, c2])
    s = np.stack([c1, a_ff + b_ff - t.i12, a_rev + b_rev - t.i12, c2])
    return a, b, s


def _check_det(det: DeterministicPair, limit: int = MAX_DET_INPUT):
    if det.input_size > limit:
        raise UnsupportedSizeError(
            f"deterministic-pair regions support |X| <= {limit}, got {det.input_size}"
        )


def tdcs_support(det: DeterministicPair, p1: float, p2: float, direction, resolution=None):
    """Private-message support in ``direction``; returns a Support."""
    w1, w2 = (float(x) for x in direction)
    n = det.input_size
    best = {}

    def objective(pts):
        a, b, s = _scheme_triples(_DetTerms(det, pts), p1, p2)
        val, r1, r2 = pentagon_support(a, b, s, w1, w2)
        k = np.argmax(val, axis=0)
        cols = np.arange(val.shape[1])
        best["scheme"], best["r1"], best["r2"] = k, r1[k, cols], r2[k, cols]
        return val[k, cols]

    px, value, _, i = maximize_on_simplex(objective, n, resolution)
    r1, r2 = float(best["r1"][i]), float(best["r2"][i])
    params = {"px": px.tolist(), "scheme": SCHEMES[int(best["scheme"][i])]}
    return Support((w1, w2), float(w1 * r1 + w2 * r2), RatePoint(r1, r2), params)


def tdcs_region(
    det: DeterministicPair, p1: float, p2: float, directions=None, resolution=None
) -> RateRegion:
    """Private-message capacity region of the deterministic-component channel.

    Each direction's support maximises, over the input pmf, the best of the
    extreme auxiliary choices; vertices are the hull of the achieving points.
    """
    p1, p2 = _check_prob("p1", p1), _check_prob("p2", p2)
    _check_det(det)
    if directions is None:
        directions = default_directions(p1, p2)
    sweep = list(directions) + [(1.0, 0.0), (0.0, 1.0)]
    sups = [tdcs_support(det, p1, p2, d, resolution) for d in sweep]
    verts = upper_right_hull([s.point.as_array() for s in sups])
    return RateRegion(sups[: len(directions)], verts, "tdcs", {"p1": p1, "p2": p2})


# -- closed forms -------------------------------------------------------------

def _safe_ratio_entropy(num, den):
    num, den = np.asarray(num, float), np.asarray(den, float)
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return np.where(den > 0, binary_entropy(np.clip(ratio, 0.0, 1.0)), 0.0)


def blackwell_bounds(alpha0, alpha1, p1: float, p2: float):
    """The three pentagon bounds (R1, R2, R1+R2) of the Blackwell channel with
    state, for P(X=0) = alpha0 and P(X=1) = alpha1."""
    a0, a1 = np.asarray(alpha0, float), np.asarray(alpha1, float)
    r1 = binary_entropy(a0) - (1 - p1) * (1 - a1) * _safe_ratio_entropy(a0, 1 - a1)
    r2 = binary_entropy(a1) - p2 * (1 - a0) * _safe_ratio_entropy(a1, 1 - a0)
    s = (
        binary_entropy(a0)
        - (1 - p1) * (1 - a1) * _safe_ratio_entropy(a0, 1 - a1)
        + (1 - p2) * (1 - a0) * _safe_ratio_entropy(a1, 1 - a0)
    )
    return r1, r2, s


def blackwell_state_region(
    p1: float, p2: float, directions=None, resolution: int = 200
) -> RateRegion:
    """Blackwell channel with state: hull of the pentagons over (alpha0, alpha1)
    together with the corners (1, 0) and (0, 1)."""
    p1, p2 = _check_prob("p1", p1), _check_prob("p2", p2)
    if p2 > p1:
        raise ModelError("blackwell_state_region expects p2 <= p1")
    pts = simplex_grid(3, resolution)
    a, b, s = blackwell_bounds(pts[:, 0], pts[:, 1], p1, p2)
    a, b = np.minimum(a, s), np.minimum(b, s)
    corners = np.concatenate([
        np.column_stack([a, np.clip(s - a, 0, b)]),
        np.column_stack([np.clip(s - b, 0, a), b]),
        [[1.0, 0.0], [0.0, 1.0]],
    ])
    verts = upper_right_hull(corners)
    if directions is None:
        directions = default_directions(p1, p2)
    return RateRegion(
        supports_from_vertices(verts, directions), verts, "blackwell", {"p1": p1, "p2": p2}
    )


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    return all(k % d for d in range(2, int(k**0.5) + 1))


def _check_field(k: int, gain) -> np.ndarray:
    if int(k) != k or not _is_prime(int(k)):
        raise ModelError(f"field size must be prime, got {k}")
    g = np.asarray(gain, dtype=int) % k
    if g.shape != (2, 2):
        raise ModelError("gain matrix must be 2x2")
    det = int(g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) % k
    try:
        pow(det, -1, int(k))
    except ValueError:
        raise ModelError("gain matrix is singular over the field") from None
    return g


DEFAULT_GAIN = ((1, 1), (1, 2))


def finite_field_pair(k: int, gain=DEFAULT_GAIN) -> DeterministicPair:
    """Components f_i(x1, x2) = h_i1 x1 + h_i2 x2 over GF(k), input index x1*k + x2."""
    g = _check_field(k, gain)
    x1, x2 = np.divmod(np.arange(k * k), k)
    f1 = (g[0, 0] * x1 + g[0, 1] * x2) % k
    f2 = (g[1, 0] * x1 + g[1, 1] * x2) % k
    return DeterministicPair.from_maps(f1, f2)


def finite_field_region(
    k: int, p1: float, p2: float, gain=DEFAULT_GAIN, directions=None, normalized: bool = False
) -> RateRegion:
    """Quadrilateral hull of (0,0), (log k, 0), (0, log k), (p1 log k, (1-p2) log k).

    With ``normalized`` the rates are in units of log k instead of bits.
    """
    p1, p2 = _check_prob("p1", p1), _check_prob("p2", p2)
    _check_field(k, gain)
    unit = 1.0 if normalized else float(np.log2(k))
    pts = unit * np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [p1, 1 - p2]])
    verts = upper_right_hull(pts, tol=1e-14)
    if directions is None:
        directions = default_directions(p1, p2)
    return RateRegion(
        supports_from_vertices(verts, directions),
        verts,
        "finite-field",
        {"k": int(k), "p1": p1, "p2": p2, "units": "logK" if normalized else "bits"},
    )


# -- common message -------------------------------------------------------------

# Constraint normals over (R0, R1, R2): the four rate bounds, then R >= 0.
_NORMALS = np.array([
    [1, 0, 0], [1, 1, 0], [1, 0, 1], [1, 1, 1],
    [-1, 0, 0], [0, -1, 0], [0, 0, -1],
], dtype=float)


def _vertex_solvers():
    out = []
    for tri in combinations(range(len(_NORMALS)), 3):
        m = _NORMALS[list(tri)]
        if abs(np.linalg.det(m)) > 1e-9:
            out.append((tri, np.linalg.inv(m)))
    return out


_SOLVERS = _vertex_solvers()


def polytope_support(rhs: np.ndarray, weights) -> tuple[np.ndarray, np.ndarray]:
    """Max of weights . R over {N R <= rhs} for a batch of rhs (B, 4); returns
    (values, argmax points)."""
    rhs = np.asarray(rhs, float)
    full = np.concatenate([rhs, np.zeros((rhs.shape[0], 3))], axis=1)
    w = np.asarray(weights, float)
    best = np.full(rhs.shape[0], -np.inf)
    arg = np.zeros((rhs.shape[0], 3))
    for tri, inv in _SOLVERS:
        pts = full[:, list(tri)] @ inv.T
        feas = np.all(pts @ _NORMALS.T <= full + 1e-12, axis=1)
        val = np.where(feas, pts @ w, -np.inf)
        better = val > best
        best = np.where(better, val, best)
        arg[better] = pts[better]
    return best, arg


def _common_rhs(gam, q, det, p1, p2):
    """Right-hand sides (B, 4) of the common-message bounds for each scheme.

    ``gam``: (B, m) weights of U0; ``q``: (B, m, n) conditional input pmfs.
    Returns rhs of shape (4 schemes, B, 4).
    """
    b, m, n = q.shape
    flat = q.reshape(-1, n)
    t = _DetTerms(det, flat)
    ca, cb, cs = (x.reshape(4, b, m) for x in _scheme_triples(t, p1, p2))
    cond = lambda x: np.einsum("bm,sbm->sb", gam, x)
    a, bb, s = cond(ca), cond(cb), cond(cs)
    i12 = a + bb - s
    pbar = np.einsum("bm,bmn->bn", gam, q)
    tb = _DetTerms(det, pbar)
    mi1 = p1 * tb.h1 + (1 - p1) * tb.h2
    mi2 = p2 * tb.h1 + (1 - p2) * tb.h2
    ci1 = p1 * t.h1 + (1 - p1) * t.h2
    ci2 = p2 * t.h1 + (1 - p2) * t.h2
    u1 = np.maximum(mi1 - np.einsum("bm,bm->b", gam, ci1.reshape(b, m)), 0.0)
    u2 = np.maximum(mi2 - np.einsum("bm,bm->b", gam, ci2.reshape(b, m)), 0.0)
    mn = np.minimum(u1, u2)
    return np.stack([
        np.broadcast_to(mn, a.shape),
        u1 + a,
        u2 + bb,
        mn + a + bb - i12,
    ], axis=-1)


def _common_value(gam, q, det, p1, p2, weights):
    rhs = _common_rhs(gam, q, det, p1, p2)
    vals, args = zip(*(polytope_support(r, weights) for r in rhs))
    vals, args = np.stack(vals), np.stack(args)
    k = np.argmax(vals, axis=0)
    cols = np.arange(vals.shape[1])
    return vals[k, cols], args[k, cols], k


def common_message_support(
    det: DeterministicPair,
    p1: float,
    p2: float,
    direction,
    resolution: int = 20,
    restarts: int = 4,
    seed: int = 0,
    tol: float = 1e-9,
) -> Support:
    """Support of the common-plus-private region in direction (l0, l1, l2).

    When l0 <= max(l1, l2) the common message is no better than private rate
    for the heavier receiver, so the private-message support is returned.
    Otherwise p(u0, x) with |U0| = |X| + 1 is searched by coordinate ascent
    from seeded restarts: each conditional pmf over a simplex grid (refined
    once), and the weights of U0 by pairwise mass transfer.
    """
    l0, l1, l2 = (float(x) for x in direction)
    n = det.input_size
    if l0 <= max(l1, l2):
        priv = tdcs_support(det, p1, p2, (l1, l2))
        r1, r2 = priv.point.r1, priv.point.r2
        return Support((l0, l1, l2), priv.value, RatePoint(r1, r2, 0.0), dict(priv.params))
    m = n + 1
    w = np.array([l0, l1, l2])
    grid = simplex_grid(n, resolution)
    steps = np.linspace(0.0, 1.0, resolution + 1)
    rng = np.random.default_rng(seed)

    def value(gam, q):
        return _common_value(gam, q, det, p1, p2, w)

    corners = np.vstack([np.eye(n), np.full(n, 1.0 / n)])
    # U0 = X (cells at the input letters) and an even spread over all cells
    starts = [(np.r_[np.full(n, 1.0 / n), 0.0], corners), (np.full(m, 1.0 / m), corners)]
    for _ in range(restarts - 2):
        starts.append((rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(n), size=m)))

    best = (-np.inf, None, None, None)
    for gam, q in starts:
        cur = float(value(gam[None], q[None])[0][0])
        while True:
            before = cur
            for u in range(m):
                for cands in (grid, None):
                    if cands is None:
                        cands = _local_patch(q[u], 1.0 / resolution)
                    qs = np.repeat(q[None], len(cands), axis=0)
                    qs[:, u] = cands
                    vals = value(np.repeat(gam[None], len(cands), 0), qs)[0]
                    j = int(np.argmax(vals))
                    if vals[j] > cur + tol:
                        q, cur = qs[j], float(vals[j])
            for i in range(m):
                for j in range(m):
                    if i == j or gam[i] <= 0:
                        continue
                    gs = np.repeat(gam[None], len(steps), 0)
                    gs[:, i] -= steps * gam[i]
                    gs[:, j] += steps * gam[i]
                    vals = value(gs, np.repeat(q[None], len(gs), 0))[0]
                    k = int(np.argmax(vals))
                    if vals[k] > cur + tol:
                        gam, cur = np.clip(gs[k], 0.0, None), float(vals[k])
            if cur - before <= tol:
                break
        if cur > best[0]:
            best = (cur, gam, q, None)

    cur, gam, q, _ = best
    # compare with U0 trivial (pure private rates)
    priv = tdcs_support(det, p1, p2, (l1, l2))
    if priv.value >= cur:
        r1, r2 = priv.point.r1, priv.point.r2
        return Support((l0, l1, l2), priv.value, RatePoint(r1, r2, 0.0), dict(priv.params))
    val, arg, k = value(gam[None], q[None])
    r0, r1, r2 = (float(max(x, 0.0)) for x in arg[0])
    params = {"u0_weights": gam.tolist(), "px_given_u0": q.tolist(), "scheme": SCHEMES[int(k[0])]}
    return Support((l0, l1, l2), float(w @ [r0, r1, r2]), RatePoint(r1, r2, r0), params)


def _local_patch(center, radius, steps: int = 5):
    return _local_simplex_grid(np.asarray(center, float), radius, steps)


def common_message_supports(
    det: DeterministicPair, p1: float, p2: float, directions, **kwargs
) -> list[Support]:
    p1, p2 = _check_prob("p1", p1), _check_prob("p2", p2)
    _check_det(det, 3)
    return [common_message_support(det, p1, p2, d, **kwargs) for d in directions]


def common_sweep(
    l0_values=(0.5, 1.5, 2.0, 3.0), lams=(0.25, 0.5, 1.0, 2.0, 4.0)
) -> list[tuple[float, float, float]]:
    """Directions (l0, 1, lam) for the common-message region."""
    return [(float(a), 1.0, float(b)) for a in l0_values for b in lams]
