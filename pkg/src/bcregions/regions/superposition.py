"""Superposition coding regions, with closed forms for erasure and three-BSC
components."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ModelError, UnsupportedSizeError
from ..prob import ConcaveEnvelope, as_pmf, binary_entropy, bconv, maximize_on_simplex
from ..state import StateBC, bec, bsc, conditional_mi
from .core import (
    RatePoint,
    RateRegion,
    Support,
    clip_halfplane,
    directions_from_lambdas,
    lambda_sweep,
    pentagon_support,
    supports_from_vertices,
    upper_right_hull,
)

THETA_TOL = 1e-6


def default_sweep(n: int = 60) -> list[tuple[float, float]]:
    return [(1.0, 0.0)] + directions_from_lambdas(lambda_sweep(n, breakpoints=[1.0])) + [(0.0, 1.0)]


class _Orientation:
    """Superposition with ``strong`` decoding both layers and the other
    receiver decoding only the cloud center U."""

    def __init__(self, bc: StateBC, strong: int, resolution):
        self.bc, self.strong, self.weak = bc, strong, 3 - strong
        self.n = bc.input_size
        self.resolution = resolution
        px, self.c_strong, _, _ = maximize_on_simplex(self._i_strong, self.n, resolution)
        self.c_strong_px = px

    def _i_strong(self, pts):
        return conditional_mi(self.bc, self.strong, pts)

    def _i_weak(self, pts):
        return conditional_mi(self.bc, self.weak, pts)

    def _triple(self, env: ConcaveEnvelope, px) -> tuple[np.ndarray, dict]:
        """(a, b, s) = (I(X;Ys|U,S), I(U;Yw|S), I(X;Ys|S)) for the envelope's
        decomposition of px."""
        res = env.query(px)
        atoms = np.array([p for _, p in res.mixture])
        wts = np.array([w for w, _ in res.mixture])
        a = float(wts @ self._i_strong(atoms))
        b = float(self._i_weak(px[None])[0] - wts @ self._i_weak(atoms))
        s = float(self._i_strong(px[None])[0])
        params = {"px": px.tolist(), "u_weights": wts.tolist(), "px_given_u": atoms.tolist()}
        return np.array([a, max(b, 0.0), s]), params

    def dual(self, lam: float, theta: float):
        """G(theta) = max_p (1-theta) Is + mu Iw + env[theta Is - mu Iw], mu = lam - 1 + theta."""
        mu = lam - 1 + theta
        last = {}

        def obj(pts):
            i_s, i_w = self._i_strong(pts), self._i_weak(pts)
            env = ConcaveEnvelope(pts, theta * i_s - mu * i_w)
            last["env"] = env
            return (1 - theta) * i_s + mu * i_w + env.at_samples()

        px, g, _, _ = maximize_on_simplex(obj, self.n, self.resolution)
        triple, params = self._triple(last["env"], px)
        return g, triple, params

    def support(self, lam: float):
        """max R_strong + lam R_weak; returns (value, (r_strong, r_weak), info)."""
        if lam <= 1:
            return self.c_strong, (self.c_strong, 0.0), {"px": self.c_strong_px.tolist()}
        triples, params = [], []

        def g(theta):
            val, t, p = self.dual(lam, theta)
            triples.append(t)
            params.append(p)
            return val

        upper = g(1.0)
        a, b, s = triples[0]
        if a + b > s + 1e-12:
            res = minimize_scalar(g, bounds=(0.0, 1.0), method="bounded",
                                  options={"xatol": THETA_TOL})
            upper = min(upper, float(res.fun))
        value, point, info = _best_mixed_point(np.array(triples), lam)
        info = dict(params[info["i"]], mix=info["mix"], j=info["j"])
        info["dual_bound"] = upper
        info.pop("i", None)
        return value, point, info


def _best_mixed_point(triples: np.ndarray, lam: float, steps: int = 1001):
    """Best pentagon point over convex combinations of pairs of achievable triples.

    Time sharing over the cloud center makes any mixture of triples
    dominated by an achievable triple, so every point returned is achievable.
    """
    m = len(triples)
    t = np.linspace(0.0, 1.0, steps)
    best = (-np.inf, None, None)
    for i in range(m):
        for j in range(i, m):
            mix = np.outer(1 - t, triples[i]) + np.outer(t, triples[j])
            val, r1, r2 = pentagon_support(mix[:, 0], mix[:, 1], mix[:, 2], 1.0, lam)
            k = int(np.argmax(val))
            if val[k] > best[0] + 1e-15:
                best = (float(val[k]), (float(r1[k]), float(r2[k])), {"i": i, "j": j, "mix": float(t[k])})
    return best


def superposition_support(bc, direction, strong=None, resolution=None, _cache=None) -> Support:
    w1, w2 = (float(x) for x in direction)
    cache = _cache if _cache is not None else {}
    best = None
    for rx in ((1, 2) if strong is None else (strong,)):
        if rx not in cache:
            cache[rx] = _Orientation(bc, rx, resolution)
        orient = cache[rx]
        ws, ww = (w1, w2) if rx == 1 else (w2, w1)
        if ws <= 0:
            if ww <= 0:
                val, pt, info = 0.0, (0.0, 0.0), {}
            else:
                # only the cloud-center receiver is weighted
                v, pt_, info = orient.support(1e6)
                val, pt = ww * pt_[1], (0.0, pt_[1])
        else:
            v, pt, info = orient.support(ww / ws)
            val = ws * v
        r1, r2 = pt if rx == 1 else pt[::-1]
        cand = Support((w1, w2), float(w1 * r1 + w2 * r2), RatePoint(r1, r2),
                       dict(info, strong=rx))
        if best is None or cand.value > best.value + 1e-15:
            best = cand
    return best


def superposition_region(
    bc: StateBC, directions=None, strong: int | None = None, resolution=None
) -> RateRegion:
    """Superposition coding region: R_strong <= I(X;Ys|U,S), R_weak <= I(U;Yw|S),
    R1 + R2 <= I(X;Ys|S), over p(u,x).

    ``strong=None`` evaluates both layerings and keeps the better support;
    the result is the capacity region when the lifted pair is ordered.
    """
    if bc.input_size not in (2, 3):
        raise UnsupportedSizeError(
            f"superposition region supports binary or ternary inputs, got {bc.input_size}"
        )
    if directions is None:
        directions = default_sweep()
    cache: dict = {}
    sweep = list(directions) + [(1.0, 0.0), (0.0, 1.0)]
    sups = [superposition_support(bc, d, strong, resolution, cache) for d in sweep]
    verts = upper_right_hull([s.point.as_array() for s in sups])
    return RateRegion(sups[: len(directions)], verts, "superposition", {"strong": strong})


# -- erasure components -------------------------------------------------------

def bec_capacities(eps, p1, p2) -> tuple[float, float]:
    eps = np.asarray(eps, float)
    if np.any((eps < 0) | (eps > 1)):
        raise ModelError("erasure probabilities must lie in [0, 1]")
    p1, p2 = as_pmf(p1), as_pmf(p2)
    if not (p1.size == p2.size == eps.size):
        raise ModelError("state pmfs need one entry per erasure component")
    return float(1 - p1 @ eps), float(1 - p2 @ eps)


def bec_state_bc(eps, p1, p2) -> StateBC:
    eps = np.atleast_1d(np.asarray(eps, float))
    comps = [bec(e) for e in eps]
    p1, p2 = np.atleast_1d(p1), np.atleast_1d(p2)
    if len(comps) == 1:
        comps, p1, p2 = comps * 2, np.r_[p1, 0.0], np.r_[p2, 0.0]
    return StateBC(tuple(comps), p1, p2)


def bec_region(eps, p1, p2, directions=None) -> RateRegion:
    """Triangle R1/C1 + R2/C2 <= 1 with C_j = 1 - sum_i p_j(i) eps_i."""
    c1, c2 = bec_capacities(np.atleast_1d(eps), np.atleast_1d(p1), np.atleast_1d(p2))
    verts = upper_right_hull([[c1, 0.0], [0.0, c2]], tol=0.0)
    if directions is None:
        directions = default_sweep()
    return RateRegion(supports_from_vertices(verts, directions), verts, "bec",
                      {"c1": c1, "c2": c2})


# -- three BSC components -----------------------------------------------------

def three_bsc_state_bc(alpha, p, q) -> StateBC:
    return StateBC(tuple(bsc(a) for a in alpha), p, q)


def three_bsc_curve(alpha, p, q, betas) -> np.ndarray:
    """Rate pairs for a single binary cloud center with X = U xor Bern(beta):
    (sum p_i [H(beta*a_i) - H(a_i)], 1 - sum q_i H(beta*a_i))."""
    a = np.asarray(alpha, float)
    hb = binary_entropy(bconv(np.asarray(betas, float)[:, None], a[None, :]))
    r1 = hb @ p - binary_entropy(a) @ p
    r2 = 1.0 - hb @ q
    return np.column_stack([np.maximum(r1, 0.0), np.maximum(r2, 0.0)])


def three_bsc_region(alpha, p, q, directions=None, n_beta: int = 4001) -> RateRegion:
    """Superposition region for three BSC components via symmetric binary
    cloud centers, capped by R1 + R2 <= 1 - sum p_i H(alpha_i).

    Receiver roles follow D(1/2) = I(X;Y1|S) - I(X;Y2|S) at the uniform
    input; if it is negative the receivers are swapped internally.
    """
    a = np.asarray(alpha, float)
    if a.shape != (3,) or np.any((a < 0) | (a > 1)):
        raise ModelError("alpha must hold three crossover probabilities in [0, 1]")
    a = np.minimum(a, 1 - a)
    p, q = as_pmf(p), as_pmf(q)
    if p.size != 3 or q.size != 3:
        raise ModelError("p and q must be pmfs over three components")
    h = binary_entropy(a)
    swap = float(p @ h) > float(q @ h)
    if swap:
        p, q = q, p
    curve = three_bsc_curve(a, p, q, np.linspace(0.0, 0.5, n_beta))
    poly = upper_right_hull(curve, tol=1e-13)
    cap = 1.0 - float(p @ h)
    poly = clip_halfplane(poly, [1.0, 1.0], cap)
    verts = upper_right_hull(poly, tol=1e-13)
    if swap:
        verts = upper_right_hull(verts[:, ::-1], tol=1e-13)
    if directions is None:
        directions = default_sweep()
    return RateRegion(supports_from_vertices(verts, directions), verts, "bsc3",
                      {"swapped": swap, "sum_cap": cap})
