"""UV outer bound supports for two-receiver channels with receiver-side state."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import UnsupportedSizeError
from ..prob import ConcaveEnvelope, maximize_on_simplex
from ..state import StateBC, conditional_mi
from .core import Support


class UVBound:
    """Evaluates the two sum-rate forms of the UV bound and single-user capacities.

    ``u_form(lam)`` is max over p(u,x) of I(U;Y1|S) + lam I(X;Y2|U,S), computed
    as max over p(x) of I1 + env[lam I2 - I1]; ``v_form(lam)`` is the mirror
    image lam I(V;Y2|S) + I(X;Y1|V,S).
    """

    def __init__(self, bc: StateBC, resolution: int | None = None):
        if bc.input_size not in (2, 3):
            raise UnsupportedSizeError(
                f"UV bound supports binary or ternary inputs, got {bc.input_size}"
            )
        self.bc = bc
        self.n = bc.input_size
        self.resolution = resolution
        self.u_form = lru_cache(maxsize=None)(self._u_form)
        self.v_form = lru_cache(maxsize=None)(self._v_form)
        self.capacity = lru_cache(maxsize=None)(self._capacity)

    def _mis(self, pts):
        return conditional_mi(self.bc, 1, pts), conditional_mi(self.bc, 2, pts)

    def _u_form(self, lam: float) -> float:
        def obj(pts):
            i1, i2 = self._mis(pts)
            return i1 + ConcaveEnvelope(pts, lam * i2 - i1).at_samples()

        return maximize_on_simplex(obj, self.n, self.resolution)[1]

    def _v_form(self, lam: float) -> float:
        def obj(pts):
            i1, i2 = self._mis(pts)
            return lam * i2 + ConcaveEnvelope(pts, i1 - lam * i2).at_samples()

        return maximize_on_simplex(obj, self.n, self.resolution)[1]

    def _capacity(self, receiver: int) -> float:
        return maximize_on_simplex(
            lambda pts: conditional_mi(self.bc, receiver, pts), self.n, self.resolution
        )[1]

    def weighted(self, lam: float) -> tuple[float, dict]:
        """Upper bound on R1 + lam R2."""
        c1, c2 = self.capacity(1), self.capacity(2)
        if lam == 0:
            return c1, {"c1": c1}
        if lam < 1:
            u = self.u_form(lam)
            alt = lam * self.v_form(1.0) + (1 - lam) * c1
            return min(u, alt), {"u_form": u, "via_sum": alt}
        if lam == 1:
            u, v = self.u_form(1.0), self.v_form(1.0)
            return min(u, v), {"u_form": u, "v_form": v}
        v = self.v_form(lam)
        alt = self.u_form(1.0) + (lam - 1) * c2
        return min(v, alt), {"v_form": v, "via_sum": alt}


def uv_outer_supports(
    bc: StateBC, directions, resolution: int | None = None
) -> list[Support]:
    """Outer-bound supports, one per direction (w1, w2) with w >= 0."""
    uv = UVBound(bc, resolution)
    out = []
    for d in directions:
        w1, w2 = (float(x) for x in d)
        if w1 <= 0:
            val, params = w2 * uv.capacity(2), {"c2": uv.capacity(2)}
        else:
            b, params = uv.weighted(w2 / w1)
            val = w1 * b
        out.append(Support((w1, w2), float(val), None, params))
    return out
