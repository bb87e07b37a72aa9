"""Independent reference computations used to freeze expected values.

Nothing here shares code with the package: the envelope is an LP over all
samples, mutual information goes through the joint pmf, and the closed forms
are re-typed from their definitions.
"""

import numpy as np
from scipy.optimize import linprog
from scipy.stats import entropy as sp_entropy


def entropy_bits(p):
    return float(sp_entropy(np.asarray(p, float), base=2))


def mi_joint(px, w):
    joint = np.asarray(px, float)[:, None] * np.asarray(w, float)
    py = joint.sum(axis=0)
    px = np.asarray(px, float)
    total = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            if joint[i, j] > 0:
                total += joint[i, j] * np.log2(joint[i, j] / (px[i] * py[j]))
    return total


def envelope_lp(points, values, q):
    """max sum_i l_i v_i subject to sum_i l_i x_i = q, l in the simplex."""
    pts = np.asarray(points, float)
    a_eq = np.vstack([pts.T, np.ones(len(pts))])
    b_eq = np.r_[np.asarray(q, float), 1.0]
    res = linprog(-np.asarray(values, float), A_eq=a_eq[1:], b_eq=b_eq[1:],
                  bounds=[(0, None)] * len(pts), method="highs")
    assert res.status == 0
    return -res.fun


def h2(x):
    x = np.clip(np.asarray(x, float), 0, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.nan_to_num(out)


def blackwell_sum_brute(p1, p2, lam, n=600):
    """max R1 + lam R2 over the Blackwell-with-state pentagons and corners."""
    best = max(1.0, lam)
    a0, a1 = np.meshgrid(np.linspace(0, 1, n + 1), np.linspace(0, 1, n + 1), indexing="ij")
    ok = a0 + a1 <= 1 + 1e-12
    a0, a1 = a0[ok], a1[ok]
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(a1 < 1, (1 - a1) * h2(a0 / np.where(a1 < 1, 1 - a1, 1)), 0)
        t2 = np.where(a0 < 1, (1 - a0) * h2(a1 / np.where(a0 < 1, 1 - a0, 1)), 0)
    r1 = h2(a0) - (1 - p1) * t1
    r2 = h2(a1) - p2 * t2
    s = h2(a0) - (1 - p1) * t1 + (1 - p2) * t2
    r1, r2 = np.minimum(r1, s), np.minimum(r2, s)
    cands = np.concatenate([r1 + lam * np.clip(s - r1, 0, r2), np.clip(s - r2, 0, r1) + lam * r2])
    return max(best, float(cands.max()))


def bsc_mixture_mi(x, alphas, weights):
    """sum_i w_i I(X; BSC(alpha_i)) for P(X=1) = x."""
    a = np.asarray(alphas, float)
    conv = x * (1 - a) + (1 - x) * a
    return float(np.asarray(weights, float) @ (h2(conv) - h2(a)))


def gaussian_split_brute(n1, n2, P, p1, p2, lam, n=2000):
    """max over (T, alpha) of R1 + lam R2 in bits for the scalar power split,
    by a dense grid (T = P is optimal, so only alpha is gridded at T = P and
    T is scanned coarsely as a check)."""
    best = -np.inf
    for T in np.linspace(0, P, 41):
        a = np.linspace(0, 1, n + 1)
        r1 = p1 * np.log2(1 + a * T / n1) + (1 - p1) * np.log2(1 + a * T / n2)
        r2 = p2 * np.log2((T + n1) / (a * T + n1)) + (1 - p2) * np.log2((T + n2) / (a * T + n2))
        best = max(best, float(np.max(r1 + lam * r2)))
    return best


def degraded_gaussian_bc_brute(n1, n2, P, lam, n=20000):
    """Fixed degraded Gaussian BC: max_alpha C(alpha P/N1) + lam C((1-alpha)P/(alpha P+N2))."""
    a = np.linspace(0, 1, n + 1)
    r1 = 0.5 * np.log2(1 + a * P / n1) * 2
    r2 = 0.5 * np.log2(1 + (1 - a) * P / (a * P + n2)) * 2
    return float(np.max(r1 + lam * r2))


def bpsk_mi_bits(amp, var):
    """I(X;Y) for X = +-amp equiprobable and Y = X + N(0, var), by quadrature."""
    from scipy.integrate import quad
    from scipy.stats import norm

    s = np.sqrt(var)

    def integrand(y):
        f0, f1 = norm.pdf(y, amp, s), norm.pdf(y, -amp, s)
        fy = 0.5 * (f0 + f1)
        return f0 * np.log2(f0 / fy) if f0 > 0 else 0.0

    lim = amp + 12 * s
    return quad(integrand, -lim, lim, limit=200)[0]
