"""Gaussian components with receiver-side state: superposition (power split)
region, dirty-paper-coding rates, and a Monte-Carlo harness that tries to find
non-Gaussian inputs beating the Gaussian split.

All logs are natural internally; public functions return bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .errors import InvariantError, ModelError, UnsupportedSizeError
from .regions.core import (
    RatePoint,
    RateRegion,
    Support,
    directions_from_lambdas,
    lambda_sweep,
    pentagon_support,
    weight_breakpoints,
    upper_right_hull,
)

LN2 = np.log(2.0)
MAX_DIM = 3


def _as_matrix(m, t, name):
    a = np.atleast_2d(np.asarray(m, float))
    if a.shape != (t, t):
        raise ModelError(f"{name} must be {t}x{t}, got {a.shape}")
    return a


@dataclass(frozen=True)
class GaussianBC:
    """Components y~_j = G x + z_j with z_j ~ N(0, N_j) and N2 - N1 PSD."""

    G: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    P: float
    p1: float
    p2: float

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.G, float))
        t = g.shape[0]
        if g.shape != (t, t):
            raise ModelError("gain matrix must be square")
        if t > MAX_DIM:
            raise UnsupportedSizeError(f"Gaussian dimension must be <= {MAX_DIM}, got {t}")
        n1, n2 = _as_matrix(self.N1, t, "N1"), _as_matrix(self.N2, t, "N2")
        for name, n in (("N1", n1), ("N2", n2)):
            if not np.allclose(n, n.T, atol=1e-12):
                raise ModelError(f"{name} must be symmetric")
            if np.linalg.eigvalsh(n).min() <= 0:
                raise ModelError(f"{name} must be positive definite")
        if np.linalg.eigvalsh(n2 - n1).min() < -1e-12:
            raise ModelError("N2 - N1 must be positive semidefinite")
        if not self.P > 0:
            raise ModelError("power budget must be positive")
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not 0 <= p <= 1:
                raise ModelError(f"{name} must lie in [0, 1]")
        object.__setattr__(self, "G", g)
        object.__setattr__(self, "N1", n1)
        object.__setattr__(self, "N2", n2)
        object.__setattr__(self, "P", float(self.P))

    @classmethod
    def scalar(cls, n1, n2, P, p1, p2, gain=1.0) -> "GaussianBC":
        return cls([[gain]], [[n1]], [[n2]], P, p1, p2)

    @property
    def t(self) -> int:
        return self.G.shape[0]

    def to_dict(self) -> dict:
        return {
            "t": self.t, "G": self.G.tolist(), "N1": self.N1.tolist(),
            "N2": self.N2.tolist(), "P": self.P, "p1": self.p1, "p2": self.p2,
        }


@dataclass(frozen=True)
class GaussianSplit:
    """Total input covariance K and receiver-1 layer covariance K1, K >= K1 >= 0."""

    K: np.ndarray
    K1: np.ndarray

    def __post_init__(self):
        k, k1 = np.atleast_2d(np.asarray(self.K, float)), np.atleast_2d(np.asarray(self.K1, float))
        if k.shape != k1.shape:
            raise ModelError("K and K1 must have the same shape")
        tol = 1e-9 * max(1.0, float(np.abs(k).max()))
        if np.linalg.eigvalsh(k1).min() < -tol or np.linalg.eigvalsh(k - k1).min() < -tol:
            raise ModelError("split must satisfy K >= K1 >= 0")
        object.__setattr__(self, "K", k)
        object.__setattr__(self, "K1", k1)

    def check_power(self, P: float):
        if np.trace(self.K) > P * (1 + 1e-9):
            raise ModelError(f"trace(K) = {np.trace(self.K):.6g} exceeds power {P}")


def _logdet(m) -> float:
    sign, val = np.linalg.slogdet(m)
    if sign <= 0:
        raise ModelError("determinant of a non positive definite matrix")
    return float(val)


def _power_split_nats(bc: GaussianBC, k, k1):
    g = bc.G
    a1 = g @ k1 @ g.T
    a = g @ k @ g.T
    ld = {
        "k1n1": _logdet(a1 + bc.N1), "k1n2": _logdet(a1 + bc.N2),
        "kn1": _logdet(a + bc.N1), "kn2": _logdet(a + bc.N2),
        "n1": _logdet(bc.N1), "n2": _logdet(bc.N2),
    }
    r1 = bc.p1 * (ld["k1n1"] - ld["n1"]) + (1 - bc.p1) * (ld["k1n2"] - ld["n2"])
    r2 = bc.p2 * (ld["kn1"] - ld["k1n1"]) + (1 - bc.p2) * (ld["kn2"] - ld["k1n2"])
    return r1, r2


def power_split_rates(bc: GaussianBC, split: GaussianSplit) -> RatePoint:
    """Rates (bits) of the Gaussian power split: receiver 1 decodes both layers."""
    split.check_power(bc.P)
    if split.K.shape != (bc.t, bc.t):
        raise ModelError("split dimension does not match the channel")
    r1, r2 = _power_split_nats(bc, split.K, split.K1)
    return RatePoint(max(r1, 0.0) / LN2, max(r2, 0.0) / LN2)


# -- scalar superposition ---------------------------------------------------------

def _scalar_terms(bc: GaussianBC):
    g2 = float(bc.G[0, 0]) ** 2
    return g2, float(bc.N1[0, 0]), float(bc.N2[0, 0])


def scalar_power_split_nats(bc: GaussianBC, T, alpha):
    """Vectorised scalar rates (nats) with K = T, K1 = alpha T."""
    g2, n1, n2 = _scalar_terms(bc)
    T, alpha = np.asarray(T, float), np.asarray(alpha, float)
    s1 = g2 * alpha * T
    s = g2 * T
    r1 = bc.p1 * np.log1p(s1 / n1) + (1 - bc.p1) * np.log1p(s1 / n2)
    r2 = bc.p2 * np.log((s + n1) / (s1 + n1)) + (1 - bc.p2) * np.log((s + n2) / (s1 + n2))
    return r1, r2


def _require_ordered(bc: GaussianBC):
    if bc.p1 < bc.p2:
        raise ModelError("the power-split region needs p1 >= p2 (receiver 1 stronger)")


def scalar_superposition_max(bc: GaussianBC, w1: float, w2: float, resolution: int = 400):
    """max over (T, alpha) of w1 R1 + w2 R2 in nats: grid, refinement, then a
    bounded local polish. Returns (value, T, alpha)."""
    _require_ordered(bc)

    def f(T, a):
        r1, r2 = scalar_power_split_nats(bc, T, a)
        return w1 * r1 + w2 * r2

    ts = np.linspace(0.0, bc.P, resolution + 1)
    al = np.linspace(0.0, 1.0, resolution + 1)
    tt, aa = np.meshgrid(ts, al, indexing="ij")
    vals = f(tt, aa)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    dt, da = bc.P / resolution, 1.0 / resolution
    ft = np.clip(ts[i] + np.linspace(-dt, dt, 21), 0, bc.P)
    fa = np.clip(al[j] + np.linspace(-da, da, 21), 0, 1)
    tt, aa = np.meshgrid(ft, fa, indexing="ij")
    vals = f(tt, aa)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    x0 = np.array([tt[i, j], aa[i, j]])
    best = float(vals[i, j])
    res = minimize(lambda z: -f(z[0], z[1]), x0, method="L-BFGS-B",
                   bounds=[(0, bc.P), (0, 1)], options={"ftol": 1e-15, "gtol": 1e-12})
    if res.success and -res.fun > best:
        x0, best = res.x, float(-res.fun)
    return best, float(x0[0]), float(x0[1])


# -- vector superposition -----------------------------------------------------

def _unpack(z, t, P):
    n = t * (t + 1) // 2
    low = np.zeros((t, t))
    low[np.tril_indices(t)] = z[:n]
    k = low @ low.T
    tr = np.trace(k)
    if tr <= 1e-15:
        k = np.eye(t) * (P / t)
        low = np.linalg.cholesky(k)
    else:
        scale = np.sqrt(P / tr)
        low, k = low * scale, k * (P / tr)
    c = z[n:].reshape(t, t)
    norm = np.linalg.norm(c, 2)
    if norm > 1:
        c = c / norm
    k1 = low @ c @ c.T @ low.T
    return k, k1


def vector_superposition_max(
    bc: GaussianBC, w1: float, w2: float, restarts: int = 32, seed: int = 0
):
    """Random-restart local search over K = L L^T (trace P) and
    K1 = L C C^T L^T with ||C|| <= 1. Returns (value nats, K, K1)."""
    _require_ordered(bc)
    t = bc.t
    rng = np.random.default_rng(seed)
    n = t * (t + 1) // 2 + t * t

    def f(z):
        k, k1 = _unpack(z, t, bc.P)
        try:
            r1, r2 = _power_split_nats(bc, k, k1)
        except ModelError:
            return np.inf
        return -(w1 * r1 + w2 * r2)

    best = (np.inf, None)
    starts = [np.r_[np.eye(t)[np.tril_indices(t)], (np.eye(t) * s).ravel()] for s in (0.0, 0.5, 1.0)]
    starts += [rng.normal(size=n) for _ in range(max(restarts - len(starts), 0))]
    for z0 in starts:
        res = minimize(f, z0, method="Nelder-Mead",
                       options={"maxiter": 600 * n, "maxfev": 1000 * n, "xatol": 1e-9, "fatol": 1e-13})
        if res.fun < best[0]:
            best = (float(res.fun), res.x)
    k, k1 = _unpack(best[1], t, bc.P)
    return -best[0], k, k1


def power_split_support(bc: GaussianBC, direction, resolution: int = 400, restarts: int = 32, seed: int = 0):
    w1, w2 = (float(x) for x in direction)
    if bc.t == 1:
        val, T, a = scalar_superposition_max(bc, w1, w2, resolution)
        k, k1 = np.array([[T]]), np.array([[a * T]])
    else:
        val, k, k1 = vector_superposition_max(bc, w1, w2, restarts, seed)
    pt = power_split_rates(bc, GaussianSplit(k, k1))
    params = {"K": k.tolist(), "K1": k1.tolist()}
    return Support((w1, w2), float(w1 * pt.r1 + w2 * pt.r2), pt, params)


def default_gaussian_sweep(bc: GaussianBC, n: int = 60):
    return [(1.0, 0.0)] + directions_from_lambdas(
        lambda_sweep(n, breakpoints=weight_breakpoints(bc.p1, bc.p2))
    ) + [(0.0, 1.0)]


def power_split_region(bc: GaussianBC, directions=None, resolution: int = 400, restarts: int = 32,
                 seed: int = 0) -> RateRegion:
    """Superposition (power-split) region; the capacity region when p1 >= p2."""
    if directions is None:
        directions = default_gaussian_sweep(bc)
    sweep = list(directions) + [(1.0, 0.0), (0.0, 1.0)]
    sups = [power_split_support(bc, d, resolution, restarts, seed) for d in sweep]
    verts = upper_right_hull([s.point.as_array() for s in sups])
    return RateRegion(sups[: len(directions)], verts, "gaussian", bc.to_dict())


# -- dirty paper coding -------------------------------------------------------

@dataclass(frozen=True)
class DpcParams:
    """X = a U1 + b U2 with unit-variance U1, U2 and correlation rho."""

    a: float
    b: float
    rho: float

    def __post_init__(self):
        if not -1 < self.rho < 1:
            raise ModelError("correlation must satisfy |rho| < 1")

    @property
    def T(self) -> float:
        return self.a**2 + self.b**2 + 2 * self.a * self.b * self.rho


@dataclass(frozen=True)
class DpcRates:
    r1: float
    r2: float
    sum_rate: float


def _dpc_nats(bc: GaussianBC, a, b, rho):
    g2, n1, n2 = _scalar_terms(bc)
    a, b, rho = (np.asarray(x, float) for x in (a, b, rho))
    om = 1 - rho**2
    s1 = g2 * (a + b * rho) ** 2
    s2 = g2 * (b + a * rho) ** 2
    i1 = g2 * b**2 * om
    i2 = g2 * a**2 * om
    r1 = bc.p1 * np.log1p(s1 / (i1 + n1)) + (1 - bc.p1) * np.log1p(s1 / (i1 + n2))
    r2 = bc.p2 * np.log1p(s2 / (i2 + n1)) + (1 - bc.p2) * np.log1p(s2 / (i2 + n2))
    return r1, r2, r1 + r2 + np.log(om)


def dpc_rates(bc: GaussianBC, params: DpcParams) -> DpcRates:
    """The three dirty-paper bounds (bits): R1, R2 and R1 + R2."""
    if bc.t != 1:
        raise UnsupportedSizeError("dirty paper rates are implemented for scalar channels")
    if params.T > bc.P * (1 + 1e-9):
        raise ModelError(f"DPC power {params.T:.6g} exceeds budget {bc.P}")
    r1, r2, s = _dpc_nats(bc, params.a, params.b, params.rho)
    return DpcRates(float(r1) / LN2, float(r2) / LN2, float(s) / LN2)


def _ellipse(T, rho, ang):
    """(a, b) with a^2 + b^2 + 2 a b rho = T."""
    u = np.cos(ang) / np.sqrt(1 + rho)
    v = np.sin(ang) / np.sqrt(1 - rho)
    scale = np.sqrt(T / 2)
    return scale * (u + v), scale * (u - v)


def dpc_weighted(bc: GaussianBC, w1, w2, T, rho, ang):
    a, b = _ellipse(T, rho, ang)
    r1, r2, s = _dpc_nats(bc, a, b, rho)
    val, _, _ = pentagon_support(r1, r2, s, w1, w2)
    return val


def dpc_max(bc: GaussianBC, w1: float, w2: float, n_t: int = 21, n_rho: int = 81, n_ang: int = 180):
    """Grid over (T, rho, ellipse angle) then Nelder-Mead polish; nats.
    Returns (value, DpcParams)."""
    ts = np.linspace(bc.P / n_t, bc.P, n_t)
    rhos = np.tanh(np.linspace(-4, 4, n_rho))
    angs = np.linspace(0, 2 * np.pi, n_ang, endpoint=False)
    tt, rr, aa = np.meshgrid(ts, rhos, angs, indexing="ij")
    vals = dpc_weighted(bc, w1, w2, tt, rr, aa)
    flat = np.argsort(vals.ravel())[::-1][:5]

    def f(z):
        T = bc.P / (1 + np.exp(-z[0]))
        return -float(dpc_weighted(bc, w1, w2, T, np.tanh(z[1]), z[2]))

    best = (-np.inf, None)
    for idx in flat:
        T0, r0, a0 = tt.flat[idx], rr.flat[idx], aa.flat[idx]
        z0 = [np.log(T0 / max(bc.P - T0, 1e-12 * bc.P)) if T0 < bc.P else 30.0,
              np.arctanh(r0), a0]
        res = minimize(f, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
        cand = max(-res.fun, float(vals.flat[idx]))
        z = res.x if -res.fun >= vals.flat[idx] else z0
        if cand > best[0]:
            best = (cand, z)
    z = best[1]
    T, rho = bc.P / (1 + np.exp(-z[0])), float(np.tanh(z[1]))
    a, b = _ellipse(T, rho, z[2])
    return best[0], DpcParams(float(a), float(b), rho)


@dataclass(frozen=True)
class DpcGap:
    lam: float
    superposition_bits: float
    dpc_bits: float
    gap_bits: float
    interior: bool
    alpha: float
    power: float
    dpc: DpcParams


def dpc_gap(bc: GaussianBC, lam: float, resolution: int = 400) -> DpcGap:
    """Superposition minus dirty-paper max of R1 + lam R2 (bits), lam > 1.

    ``interior`` reports whether the superposition optimum is off the
    corners (C1, 0) and (0, C2); only then is a strict gap expected.
    """
    if bc.t != 1:
        raise UnsupportedSizeError("the DPC comparison is implemented for scalar channels")
    if not lam > 1:
        raise ModelError("dpc_gap needs lambda > 1")
    sup, T, alpha = scalar_superposition_max(bc, 1.0, lam, resolution)
    dpc, params = dpc_max(bc, 1.0, lam)
    gap = (sup - dpc) / LN2
    if gap < -1e-9:
        raise InvariantError(f"dirty paper coding beat superposition by {-gap:.3g} bits")
    c1 = scalar_superposition_max(bc, 1.0, 0.0, resolution)[0]
    c2 = scalar_superposition_max(bc, 0.0, 1.0, resolution)[0]
    corner = max(c1, lam * c2)
    interior = bool(sup - corner > 1e-9 and 1e-6 < alpha < 1 - 1e-6)
    return DpcGap(float(lam), sup / LN2, dpc / LN2, max(gap, 0.0), interior, alpha, T, params)


# -- Monte-Carlo refutation harness ------------------------------------------

@dataclass(frozen=True)
class DiscreteStrategy:
    """Finite-support p(u, x): cloud weights and per-cloud input atoms/pmfs."""

    u_weights: np.ndarray
    atoms: np.ndarray
    x_given_u: np.ndarray

    def power(self) -> float:
        return float(self.u_weights @ (self.x_given_u @ self.atoms**2))


def random_strategy(rng, P: float, max_clouds: int = 3, levels: int = 7) -> DiscreteStrategy:
    """Random quantized strategy with E[X^2] uniform in [0.2 P, P]."""
    m = int(rng.integers(1, max_clouds + 1))
    grid = np.linspace(-1, 1, levels)
    wu = rng.dirichlet(np.ones(m))
    px = rng.dirichlet(np.full(levels, 0.5), size=m)
    pw = float(wu @ (px @ grid**2))
    target = P * rng.uniform(0.2, 1.0)
    return DiscreteStrategy(wu, grid * np.sqrt(target / max(pw, 1e-12)), px)


def _log_gauss(y, var):
    return -0.5 * (np.log(2 * np.pi * var) + y**2 / var)


def strategy_samples(bc: GaussianBC, strat: DiscreteStrategy, lam: float, n: int, rng) -> np.ndarray:
    """Per-sample contributions (nats) whose mean estimates
    I(X;Y1|U,S) + lam I(U;Y2|S) for the strategy."""
    g = float(bc.G[0, 0])
    noise = (float(bc.N1[0, 0]), float(bc.N2[0, 0]))
    m = len(strat.u_weights)
    u = rng.choice(m, size=n, p=strat.u_weights)
    cum = np.cumsum(strat.x_given_u, axis=1)
    xi = np.minimum((rng.random(n)[:, None] > cum[u]).sum(axis=1), len(strat.atoms) - 1)
    x = strat.atoms[xi]
    joint = strat.u_weights[:, None] * strat.x_given_u  # (m, levels)
    log_joint = np.log(np.where(joint > 0, joint, 1.0)) + np.where(joint > 0, 0.0, -np.inf)
    log_cond = np.log(np.where(strat.x_given_u > 0, strat.x_given_u, 1.0)) + np.where(
        strat.x_given_u > 0, 0.0, -np.inf
    )
    total = np.zeros(n)
    weights = {0: (bc.p1, lam * bc.p2), 1: (1 - bc.p1, lam * (1 - bc.p2))}
    for comp, var in enumerate(noise):
        y = g * x + rng.normal(scale=np.sqrt(var), size=n)
        dens = _log_gauss(y[:, None] - g * strat.atoms[None, :], var)  # (n, levels)
        log_y_x = _log_gauss(y - g * x, var)
        log_y_u = logsumexp(dens + log_cond[u], axis=1)
        log_y = logsumexp(dens[:, None, :] + log_joint[None], axis=(1, 2))
        w_priv, w_cloud = weights[comp]
        total += w_priv * (log_y_x - log_y_u) + w_cloud * (log_y_u - log_y)
    return total


def jackknife(samples: np.ndarray, blocks: int = 50) -> tuple[float, float]:
    """Mean and delete-a-block jackknife standard error."""
    n = len(samples) - len(samples) % blocks
    parts = samples[:n].reshape(blocks, -1).mean(axis=1)
    mean = float(samples[:n].mean())
    loo = (parts.sum() - parts) / (blocks - 1)
    se = float(np.sqrt((blocks - 1) / blocks * np.sum((loo - loo.mean()) ** 2)))
    return mean, se


@dataclass(frozen=True)
class RefutationResult:
    lam: float
    gaussian_bits: float
    estimates_bits: np.ndarray
    stderr_bits: np.ndarray
    exceedances: int


def gaussian_dominance_check(
    bc: GaussianBC, lam: float, strategies: int = 100, samples: int = 10**6, seed: int = 0
) -> RefutationResult:
    """Count random discrete strategies whose estimated weighted sum beats the
    Gaussian support by more than three standard errors."""
    if bc.t != 1:
        raise UnsupportedSizeError("the sampling harness is scalar only")
    if lam < 1:
        raise ModelError("the sampling harness checks lambda >= 1")
    rng = np.random.default_rng(seed)
    gauss = scalar_superposition_max(bc, 1.0, lam)[0] / LN2
    est, err = np.empty(strategies), np.empty(strategies)
    for i in range(strategies):
        strat = random_strategy(rng, bc.P)
        m, s = jackknife(strategy_samples(bc, strat, lam, samples, rng))
        est[i], err[i] = m / LN2, s / LN2
    exceed = int(np.sum(est - 3 * err > gauss))
    return RefutationResult(float(lam), gauss, est, err, exceed)
