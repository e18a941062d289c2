"""Extended-precision reference values for the canonical ring.

Used where double precision cannot resolve the quantity being checked, e.g.
relative deviations of order 1e-30 in asymptotic trend checks.  Everything
here is in the 2π-free convention and returns ``mpmath.mpf``.
"""

from __future__ import annotations

import math
from typing import Dict, List, Tuple

import mpmath

DEFAULT_DPS = 60


def _cutoff(alpha: float, L: float, dps: int) -> Tuple[int, int]:
    need = (dps + 10) * math.log(10.0)
    out = []
    for a in (alpha, 1.0 - alpha):
        rate = 2.0 * a * L
        k = 8
        while rate * k - 6.0 * math.log(k + 1) < need:
            k += 1
        out.append(k)
    return out[0], out[1]


def canonical_weights(alpha, L, dps: int = DEFAULT_DPS) -> Tuple[List[int], List]:
    """Weights on ``k = n + 1`` for the ring ``P(r^{1-α}, r^{-α})``, ``r = e^{-L}``."""
    with mpmath.workdps(dps):
        a, L_ = mpmath.mpf(alpha), mpmath.mpf(L)
        kp, kn = _cutoff(float(alpha), float(L), dps)
        ks, ws = [], []
        for k in range(-kn, kp + 1):
            if k == 0:
                w = 1 / L_
            else:
                e = a if k > 0 else 1 - a
                m = abs(k)
                w = 2 * m * mpmath.exp(-2 * m * e * L_) / (-mpmath.expm1(-2 * m * L_))
            ks.append(k)
            ws.append(w)
        return ks, ws


def hankel_dets(ks, ws, dps: int = DEFAULT_DPS):
    """``det1, det2, det3`` of the moment Hankel matrices, as positive sums."""
    with mpmath.workdps(dps):
        n = len(ks)
        d1 = mpmath.fsum(ws)
        d2 = mpmath.fsum(
            ws[a] * ws[b] * (ks[b] - ks[a]) ** 2 for a in range(n) for b in range(a + 1, n)
        )
        total = []
        for b in range(n):
            left = {p: mpmath.fsum(ws[a] * (ks[b] - ks[a]) ** p for a in range(b)) for p in (2, 3, 4)}
            right = {p: mpmath.fsum(ws[c] * (ks[c] - ks[b]) ** p for c in range(b + 1, n)) for p in (2, 3, 4)}
            total.append(ws[b] * (left[4] * right[2] + 2 * left[3] * right[3] + left[2] * right[4]))
        return d1, d2, mpmath.fsum(total)


def canonical_j(alpha, L, dps: int = DEFAULT_DPS):
    """``(J0, J1, J2)`` at 1 for the canonical ring, 2π-free convention."""
    ks, ws = canonical_weights(alpha, L, dps)
    with mpmath.workdps(dps):
        d1, d2, d3 = hankel_dets(ks, ws, dps)
        return d1, d2 / d1, d3 / d2


def numerator_lead(alpha, L, dps: int = DEFAULT_DPS):
    """``(|c1|, S)``: the 1/L coefficients of the second-order numerator and denominator."""
    ks, ws = canonical_weights(alpha, L, dps)
    with mpmath.workdps(dps):
        pairs = [(k, w * k * k) for k, w in zip(ks, ws) if k != 0]
        kk = [p[0] for p in pairs]
        vv = [p[1] for p in pairs]
        n = len(kk)
        c1 = mpmath.fsum(vv[a] * vv[b] * (kk[b] - kk[a]) ** 2 for a in range(n) for b in range(a + 1, n))
        return c1, mpmath.fsum(vv)


def naive_moments(alpha, L, dps: int = DEFAULT_DPS) -> Dict[int, object]:
    """``phi(j) = sum_n n^j / alpha_n`` for ``j = 0..4`` (2π-free)."""
    ks, ws = canonical_weights(alpha, L, dps)
    with mpmath.workdps(dps):
        return {j: mpmath.fsum(w * (k - 1) ** j for k, w in zip(ks, ws)) for j in range(5)}
