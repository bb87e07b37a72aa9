"""Certificates for pairwise channel orderings and their transfer from
component pairs to state-lifted broadcast channels.

Conventions: ``is_degraded(W1, W2)`` asks whether W2 is a degraded version
of W1; ``is_less_noisy(W1, W2)`` and ``is_more_capable(W1, W2)`` ask whether
W1 dominates W2; ``is_dominantly_c_symmetric(W1, W2)`` asks whether
I(X;Y1) - I(X;Y2) peaks at the uniform input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import InvariantError, ModelError, UnsupportedSizeError
from .prob import (
    ConcaveEnvelope,
    as_channel,
    binary_entropy,
    default_resolution,
    maximize_on_simplex,
    mutual_information,
    simplex_grid,
)
from .state import StateBC, bec, bsc, conditional_mi, lift_state_channel

DEGRADED_TOL = 1e-7
ENVELOPE_TOL = 1e-6
SYMMETRY_TOL = 1e-12


class NotCSymmetricError(ModelError):
    pass


def _pair(w1, w2):
    w1, w2 = as_channel(w1), as_channel(w2)
    if w1.shape[0] != w2.shape[0]:
        raise ModelError("channels must share the input alphabet")
    return w1, w2


def degradation_residual(w1, w2, q) -> float:
    return float(np.max(np.abs(np.asarray(w1) @ np.asarray(q) - np.asarray(w2))))


def is_degraded(w1, w2, tol: float = DEGRADED_TOL) -> tuple[bool, np.ndarray | None]:
    """Is W2 = W1 Q for some row-stochastic Q? Returns (verdict, Q)."""
    w1, w2 = _pair(w1, w2)
    nx, n1 = w1.shape
    n2 = w2.shape[1]
    nq = n1 * n2
    # variables: Q (row-major) then the sup-norm residual t
    a_q = np.kron(w1, np.eye(n2))
    ones = np.ones((nx * n2, 1))
    a_ub = np.vstack([np.hstack([a_q, -ones]), np.hstack([-a_q, -ones])])
    b_ub = np.concatenate([w2.ravel(), -w2.ravel()])
    a_eq = np.hstack([np.kron(np.eye(n1), np.ones((1, n2))), np.zeros((n1, 1))])
    c = np.zeros(nq + 1)
    c[-1] = 1.0
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.ones(n1),
        bounds=[(0, None)] * (nq + 1), method="highs",
    )
    if res.status != 0:
        raise InvariantError(f"degradedness LP failed: {res.message}")
    q = np.clip(res.x[:nq].reshape(n1, n2), 0.0, None)
    q /= q.sum(axis=1, keepdims=True)
    ok = degradation_residual(w1, w2, q) <= tol
    return ok, (q if ok else None)


def _mi_difference(w1, w2, pts):
    return np.asarray(mutual_information(pts, w1)) - np.asarray(mutual_information(pts, w2))


def _check_alphabet(n: int):
    if n > 3:
        raise UnsupportedSizeError(f"ordering certificates support |X| <= 3, got {n}")


def is_less_noisy(
    w1, w2, resolution: int | None = None, tol: float = ENVELOPE_TOL
) -> tuple[bool, np.ndarray | None]:
    """W1 less noisy than W2 iff I(X;Y1) - I(X;Y2) equals its concave envelope."""
    w1, w2 = _pair(w1, w2)
    n = w1.shape[0]
    _check_alphabet(n)
    if n == 1:
        return True, None
    pts = simplex_grid(n, resolution or default_resolution(n))
    d = _mi_difference(w1, w2, pts)
    gap = ConcaveEnvelope(pts, d).at_samples() - d
    worst = int(np.argmax(gap))
    if gap[worst] <= tol:
        return True, None
    return False, pts[worst]


def is_more_capable(
    w1, w2, resolution: int | None = None, tol: float = ENVELOPE_TOL
) -> tuple[bool, np.ndarray | None]:
    """W1 more capable than W2 iff I(X;Y1) >= I(X;Y2) for every input pmf."""
    w1, w2 = _pair(w1, w2)
    n = w1.shape[0]
    _check_alphabet(n)
    if n == 1:
        return True, None
    q, neg_min, _, _ = maximize_on_simplex(
        lambda pts: -_mi_difference(w1, w2, pts), n, resolution
    )
    if -neg_min >= -tol:
        return True, None
    return False, q


def c_symmetry_permutations(w) -> list[np.ndarray] | None:
    """Output permutations pi_j with W[(i+j) mod m, pi_j(y)] = W[i, y], or None."""
    w = as_channel(w)
    m, ny = w.shape
    perms = []
    for j in range(m):
        target = np.roll(w, j, axis=0)
        perm = np.full(ny, -1)
        used = np.zeros(ny, dtype=bool)
        for y in range(ny):
            match = np.all(np.abs(w - target[:, [y]]) <= SYMMETRY_TOL, axis=0) & ~used
            hits = np.flatnonzero(match)
            if hits.size == 0:
                return None
            perm[y] = hits[0]
            used[hits[0]] = True
        perms.append(perm)
    return perms


def is_c_symmetric(w) -> tuple[bool, list[np.ndarray] | None]:
    perms = c_symmetry_permutations(w)
    return perms is not None, perms


def is_dominantly_c_symmetric(
    w1, w2, resolution: int | None = None, tol: float = ENVELOPE_TOL
) -> bool:
    w1, w2 = _pair(w1, w2)
    for name, w in (("first", w1), ("second", w2)):
        if c_symmetry_permutations(w) is None:
            raise NotCSymmetricError(f"{name} channel is not c-symmetric")
    n = w1.shape[0]
    _check_alphabet(n)
    if n == 1:
        return True
    uniform = np.full(n, 1.0 / n)
    at_uniform = float(_mi_difference(w1, w2, uniform[None])[0])
    _, peak, _, _ = maximize_on_simplex(lambda pts: _mi_difference(w1, w2, pts), n, resolution)
    return peak <= at_uniform + tol


@dataclass(frozen=True)
class OrderingReport:
    degraded: bool
    less_noisy: bool
    more_capable: bool
    c_symmetric: bool
    dominantly_c_symmetric: bool
    degraded_witness: np.ndarray | None = None
    less_noisy_violation: np.ndarray | None = None
    more_capable_violation: np.ndarray | None = None
    permutations: tuple[list[np.ndarray] | None, list[np.ndarray] | None] = field(
        default=(None, None)
    )

    def __post_init__(self):
        if self.degraded and not self.less_noisy:
            raise InvariantError("degraded pair failed the less-noisy certificate")
        if self.less_noisy and not self.more_capable:
            raise InvariantError("less-noisy pair failed the more-capable certificate")

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "degraded": self.degraded,
            "degraded_witness": arr(self.degraded_witness),
            "less_noisy": self.less_noisy,
            "less_noisy_violation": arr(self.less_noisy_violation),
            "more_capable": self.more_capable,
            "more_capable_violation": arr(self.more_capable_violation),
            "c_symmetric": self.c_symmetric,
            "permutations": [
                None if p is None else [list(map(int, x)) for x in p] for p in self.permutations
            ],
            "dominantly_c_symmetric": self.dominantly_c_symmetric,
        }


def ordering_report(w1, w2, resolution: int | None = None) -> OrderingReport:
    """Run every certifier on the pair (W1 stronger, W2 weaker)."""
    w1, w2 = _pair(w1, w2)
    deg, q = is_degraded(w1, w2)
    ln, ln_bad = is_less_noisy(w1, w2, resolution)
    mc, mc_bad = is_more_capable(w1, w2, resolution)
    perms = (c_symmetry_permutations(w1), c_symmetry_permutations(w2))
    csym = perms[0] is not None and perms[1] is not None
    dcs = csym and is_dominantly_c_symmetric(w1, w2, resolution)
    return OrderingReport(deg, ln, mc, csym, dcs, q, ln_bad, mc_bad, perms)


def transfer_check(bc: StateBC, resolution: int | None = None) -> OrderingReport:
    """Certify the lifted pair and check it inherits every ordering of the components.

    Requires two components with p1(1) >= p2(1); returns the lifted report.
    """
    if bc.k != 2:
        raise ModelError("transfer_check needs exactly two components")
    if bc.p1[0] < bc.p2[0]:
        raise ModelError("transfer_check expects p1(1) >= p2(1); relabel receivers")
    comp = ordering_report(bc.components[0], bc.components[1], resolution)
    lifted = ordering_report(lift_state_channel(bc, 1), lift_state_channel(bc, 2), resolution)
    for name in ("degraded", "less_noisy", "more_capable", "dominantly_c_symmetric"):
        if getattr(comp, name) and not getattr(lifted, name):
            raise InvariantError(f"component pair is {name} but the lifted pair is not")
    return lifted


def product_transfer_check(
    bc_a: StateBC, bc_b: StateBC, resolution: int | None = None, tol: float = ENVELOPE_TOL
) -> bool:
    """Check the lifted product channel is reversely more capable.

    ``bc_a`` drives input X1 with components (y~11, y~21); ``bc_b`` drives X2
    with components (y~12, y~22). Receiver 1 must be more capable on X1 and
    receiver 2 on X2, given that component 1 of ``bc_a`` and component 2 of
    ``bc_b`` are the more capable components.
    """
    for name, bc in (("bc_a", bc_a), ("bc_b", bc_b)):
        if bc.k != 2:
            raise ModelError(f"{name} must have two components")
        if bc.p1[0] < bc.p2[0]:
            raise ModelError(f"{name} violates the labelling p(receiver 1) >= p(receiver 2)")
    if not is_more_capable(bc_a.components[0], bc_a.components[1], resolution)[0]:
        raise ModelError("bc_a components are not ordered (component 1 more capable)")
    if not is_more_capable(bc_b.components[1], bc_b.components[0], resolution)[0]:
        raise ModelError("bc_b components are not ordered (component 2 more capable)")
    ok = True
    for bc, sign in ((bc_a, 1.0), (bc_b, -1.0)):
        n = bc.input_size
        pts = simplex_grid(n, resolution or default_resolution(n))
        diff = conditional_mi(bc, 1, pts) - conditional_mi(bc, 2, pts)
        ok &= bool(np.all(sign * np.asarray(diff) >= -tol))
    return ok


# -- BSC / BEC threshold atlas ------------------------------------------------

ATLAS_ORDERINGS = ("degraded", "less_noisy", "more_capable", "dominantly_c_symmetric")


def bsc_bec_thresholds(p: float) -> dict[str, float]:
    """Erasure thresholds for the BSC(p)/BEC(e) pair as functions of p."""
    return {
        "degraded": 2 * p,
        "less_noisy": 4 * p * (1 - p),
        "more_capable": float(binary_entropy(p)),
        "dominantly_c_symmetric": float(binary_entropy(p)),
    }


def bsc_bec_verdicts(p: float, e: float, resolution: int | None = None) -> dict[str, bool]:
    """Certifier verdicts: BSC degraded w.r.t. BEC, BEC less noisy / more capable
    than BSC, and the BSC-over-BEC pair dominantly c-symmetric."""
    c, b = bsc(p), bec(e)
    return {
        "degraded": is_degraded(b, c)[0],
        "less_noisy": is_less_noisy(b, c, resolution)[0],
        "more_capable": is_more_capable(b, c, resolution)[0],
        "dominantly_c_symmetric": is_dominantly_c_symmetric(c, b, resolution),
    }


def bsc_bec_atlas(n: int = 50, band: float = 0.02, resolution: int | None = None) -> list[dict]:
    """Compare certifier verdicts with the closed-form thresholds on an n x n grid."""
    rows = []
    for p in np.linspace(0.0, 0.5, n):
        thr = bsc_bec_thresholds(float(p))
        for e in np.linspace(0.0, 1.0, n):
            verdicts = bsc_bec_verdicts(float(p), float(e), resolution)
            for name in ATLAS_ORDERINGS:
                t = thr[name]
                expected = e >= t if name == "dominantly_c_symmetric" else e <= t
                rows.append({
                    "p": float(p),
                    "e": float(e),
                    "ordering": name,
                    "threshold": t,
                    "expected": bool(expected),
                    "verdict": bool(verdicts[name]),
                    "in_band": abs(e - t) < band,
                })
    return rows
