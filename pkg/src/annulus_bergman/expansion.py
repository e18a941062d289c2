"""Exact polynomial expansion of the extremal-formula numerators in 1/L.

Every moment sum splits as ``phi(j) = (-1)**j * u + psi(j)`` with ``u = 1/L``.
The products entering the denominator and the second-order numerator are
expanded here with integer coefficients, so the vanishing of the high powers
of ``u`` is an identity between polynomials rather than a floating-point
observation.  The check runs once at import time.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Dict, Sequence, Tuple

# Monomial exponents over the variables (u, psi0, psi1, psi2, psi3, psi4).
Monomial = Tuple[int, int, int, int, int, int]
Poly = Dict[Monomial, int]

_NVARS = 6


def _clean(p):
    return {m: c for m, c in p.items() if c != 0}


def padd(*ps: Poly) -> Poly:
    out: Dict[Monomial, int] = defaultdict(int)
    for p in ps:
        for m, c in p.items():
            out[m] += c
    return _clean(out)


def pscale(p: Poly, s: int) -> Poly:
    return _clean({m: s * c for m, c in p.items()})


def pmul(*ps: Poly) -> Poly:
    out: Poly = {(0,) * _NVARS: 1}
    for p in ps:
        acc: Dict[Monomial, int] = defaultdict(int)
        for m1, c1 in out.items():
            for m2, c2 in p.items():
                acc[tuple(a + b for a, b in zip(m1, m2))] += c1 * c2
        out = _clean(acc)
    return out


def psi(j: int) -> Poly:
    e = [0] * _NVARS
    e[1 + j] = 1
    return {tuple(e): 1}


def phi(j: int) -> Poly:
    """``(-1)**j * u + psi(j)``."""
    u = [0] * _NVARS
    u[0] = 1
    return padd({tuple(u): (-1) ** j}, psi(j))


def u_coefficients(p: Poly) -> Dict[int, Poly]:
    """Split ``p`` by powers of ``u``: ``{k: coefficient polynomial of u**k}``."""
    out: Dict[int, Poly] = defaultdict(dict)
    for m, c in p.items():
        out[m[0]][(0,) + m[1:]] = c
    return dict(out)


def evaluate(p: Poly, psi_values: Sequence[float], u: float = 0.0) -> float:
    terms = []
    for m, c in p.items():
        t = float(c) * u ** m[0]
        for j in range(5):
            if m[1 + j]:
                t *= psi_values[j] ** m[1 + j]
        terms.append(t)
    return math.fsum(terms)


def show(p: Poly) -> str:
    names = ["u", "psi0", "psi1", "psi2", "psi3", "psi4"]
    parts = []
    for m, c in sorted(p.items(), reverse=True):
        factors = [
            n if e == 1 else f"{n}^{e}" for n, e in zip(names, m) if e
        ]
        parts.append(f"{c:+d}*" + "*".join(factors) if factors else f"{c:+d}")
    return " ".join(parts) if parts else "0"


# phi(1)^2 - phi(2) phi(0)
DENOMINATOR = padd(pmul(phi(1), phi(1)), pscale(pmul(phi(2), phi(0)), -1))

# phi4 phi1^2 - phi4 phi2 phi0 - 2 phi3 phi2 phi1 + phi3^2 phi0 + phi2^3
NUMERATOR = padd(
    pmul(phi(4), phi(1), phi(1)),
    pscale(pmul(phi(4), phi(2), phi(0)), -1),
    pscale(pmul(phi(3), phi(2), phi(1)), -2),
    pmul(phi(3), phi(3), phi(0)),
    pmul(phi(2), phi(2), phi(2)),
)

# Numerators of the two shift coefficients of the second-order problem.
BETA_NUMERATOR = padd(pmul(phi(2), phi(1)), pscale(pmul(phi(3), phi(0)), -1))
GAMMA_NUMERATOR = padd(pmul(phi(1), phi(3)), pscale(pmul(phi(2), phi(2)), -1))

# The 1/L coefficient of NUMERATOR exactly as it is commonly printed, kept for
# comparison with the derived one.
PRINTED_NUMERATOR_C1 = padd(
    pmul(psi(1), psi(1)),
    pscale(pmul(psi(1), psi(4)), -2),
    pscale(pmul(psi(4), psi(2)), -1),
    pscale(pmul(psi(4), psi(0)), -1),
    pscale(pmul(psi(2), psi(0)), -1),
    pscale(
        padd(
            pscale(pmul(psi(2), psi(1)), -1),
            pmul(psi(3), psi(1)),
            pscale(pmul(psi(2), psi(3)), -1),
        ),
        -2,
    ),
    pmul(psi(3), psi(3)),
    pscale(pmul(psi(0), psi(3)), -2),
    pscale(pmul(psi(2), psi(2)), 3),
)

PRINTED_DENOMINATOR_C1 = pscale(padd(psi(2), psi(0), pscale(psi(1), 2)), -1)


def _split(p: Poly, degree: int) -> Tuple[Poly, Poly]:
    """Return (c1, c0) after checking every u-power above one vanishes."""
    coeffs = u_coefficients(p)
    for k in range(2, degree + 1):
        if coeffs.get(k):
            raise AssertionError(
                f"u^{k} coefficient does not cancel: {show(coeffs[k])}"
            )
    return coeffs.get(1, {}), coeffs.get(0, {})


NUMERATOR_C1, NUMERATOR_C0 = _split(NUMERATOR, 3)
DENOMINATOR_C1, DENOMINATOR_C0 = _split(DENOMINATOR, 2)
BETA_C1, BETA_C0 = _split(BETA_NUMERATOR, 2)
GAMMA_C1, GAMMA_C0 = _split(GAMMA_NUMERATOR, 2)
