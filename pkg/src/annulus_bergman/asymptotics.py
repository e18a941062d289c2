"""Leading-order behaviour of the J's at ``r^α`` in ``P(r, 1)`` as ``r -> 0``.

Quantities named ``*_lead`` and the measured sides of :func:`tilde_verify` use
the 2π-free convention: ``r^{2(j+1)α} J^(j)`` times ``2π``, which equals the
canonical moment quotient at 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence

import mpmath
import numpy as np

from . import reference
from .core import Truncation, numerator_lead_log
from .errors import BergmanError, DomainError
from .geometry import canonical_eval

DEFAULT_A_MAG = 150.0
# The r^{6α} and r^{6(1-α)} coefficients of |A(r)| coincide by the inversion
# symmetry λ -> 1/λ of the canonical ring.
SYMMETRIC_A_MAG = 32.0


class Regime(str, enum.Enum):
    LOG = "LOG"
    LEFT_POWER = "LEFT_POWER"
    RIGHT_POWER = "RIGHT_POWER"


@dataclass(frozen=True)
class RateLaw:
    """``rate(r) = 1 / (r^exponent * (-log r))``."""

    regime: Regime
    exponent: float

    def __post_init__(self):
        if (self.exponent == 0.0) != (self.regime is Regime.LOG):
            raise DomainError("exponent must be 0 exactly in the LOG regime")
        if self.regime is not Regime.LOG and not 0.0 < self.exponent <= 1.0:
            raise DomainError("power-regime exponent must lie in (0, 1]")

    @property
    def description(self) -> str:
        if self.regime is Regime.LOG:
            return "1/(-log r)"
        return f"1/(r^{self.exponent:.6g}*(-log r))"

    def log_rate(self, L: float) -> float:
        return self.exponent * L - math.log(L)

    def rate(self, L: float) -> float:
        return math.exp(self.log_rate(L))


def _check_alpha(alpha: float):
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def regime(alpha: float) -> RateLaw:
    _check_alpha(alpha)
    if alpha <= 1.0 / 3.0 or alpha >= 2.0 / 3.0:
        return RateLaw(Regime.LOG, 0.0)
    if alpha <= 0.5:
        return RateLaw(Regime.LEFT_POWER, 6.0 * alpha - 2.0)
    return RateLaw(Regime.RIGHT_POWER, 6.0 * (1.0 - alpha) - 2.0)


# --------------------------------------------------------------------------
# Predicted leading terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticPrediction:
    r: float
    alpha: float
    j0_lead: float
    j1_lead: float
    j2_lead: float
    a_of_r: float
    A_mag: float
    A_source: str
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.A_mag > 0:
            raise DomainError("A_mag must be positive")


def _template_terms(L, alpha, lib=math):
    """The three terms of ``|A(r)|`` without the free coefficient on the middle one."""
    r2 = lib.exp(-2 * L)
    d1 = -lib.expm1(-2 * L)
    d2 = -lib.expm1(-4 * L)
    t_r2 = 16 * r2 / (d1 * d1)
    t_free = lib.exp(-6 * (1 - alpha) * L) / (d1 * d2)
    t_r6a = 32 * lib.exp(-6 * alpha * L) / (d1 * d2)
    return t_r2, t_free, t_r6a


def j1_lead_L(L, alpha, lib=math):
    return 2 * (lib.exp(-2 * alpha * L) + lib.exp(-2 * (1 - alpha) * L)) / (-lib.expm1(-2 * L))


def a_of_r_L(L, alpha, A_mag, lib=math):
    t_r2, t_free, t_r6a = _template_terms(L, alpha, lib)
    return t_r2 + A_mag * t_free + t_r6a


def predicted_leading_L(L: float, alpha: float, A_mag: float = DEFAULT_A_MAG, A_source: str = "assumed"):
    _check_alpha(alpha)
    if not (math.isfinite(L) and L > 0):
        raise DomainError("need L = -log r > 0")
    a = a_of_r_L(L, alpha, A_mag)
    b = j1_lead_L(L, alpha)
    return AsymptoticPrediction(
        r=math.exp(-L),
        alpha=alpha,
        j0_lead=1.0 / L,
        j1_lead=b,
        j2_lead=a / b,
        a_of_r=a,
        A_mag=A_mag,
        A_source=A_source,
        coefficients={"c_r2": 16.0, "c_r6a": 32.0, "c_r61ma": A_mag},
    )


def predicted_leading(r: float, alpha: float, A_mag: float = DEFAULT_A_MAG, A_source: str = "assumed"):
    if not 0.0 < r < 1.0:
        raise DomainError("r must lie in (0, 1)")
    return predicted_leading_L(-math.log(r), alpha, A_mag, A_source)


# --------------------------------------------------------------------------
# Rate constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateStudy:
    alpha: float
    law: RateLaw
    L_list: List[float]
    products: List[float]
    last: float
    spread: float
    cauchy: bool


def defect_times_inv_rate(alpha: float, L: float, trunc: Truncation = Truncation()) -> float:
    law = regime(alpha)
    e = canonical_eval(alpha, L, trunc)
    return math.exp(e.j.log_defect - law.log_rate(L))


def rate_constant_study(alpha: float, L_list: Sequence[float], trunc: Truncation = Truncation()) -> RateStudy:
    """``defect * r^p * (-log r)`` along ``L_list``; ``spread`` is over the final three."""
    L_list = [float(x) for x in L_list]
    if any(b <= a for a, b in zip(L_list, L_list[1:])):
        raise DomainError("L_list must be strictly increasing")
    law = regime(alpha)
    prods = [defect_times_inv_rate(alpha, L, trunc) for L in L_list]
    tail = prods[-3:]
    spread = (max(tail) - min(tail)) / abs(tail[-1])
    return RateStudy(alpha, law, L_list, prods, prods[-1], spread, spread < 0.2)


# --------------------------------------------------------------------------
# "~" verification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TildeReport:
    eps: float
    L_list: List[float]
    errors: List[float]
    passed: bool


def tilde_verify(
    measured: Callable[[float], object],
    predicted: Callable[[float], object],
    eps: float,
    L_list: Sequence[float],
    dps: int = reference.DEFAULT_DPS,
) -> TildeReport:
    """Check ``measured = predicted (1 + o(r^eps))`` along ``r = e^{-L}``.

    Both callables take ``L``; they may return floats or ``mpmath.mpf``.  The
    normalised error ``|m - p| / (|p| r^eps)`` must decrease over the last
    three grid points (non-strictly when it is identically zero).
    """
    L_list = [float(x) for x in L_list]
    if len(L_list) < 3:
        raise DomainError("need at least three L values")
    if any(b <= a for a, b in zip(L_list, L_list[1:])):
        raise DomainError("L_list must be strictly increasing")
    errs = []
    with mpmath.workdps(dps):
        for L in L_list:
            m, p = mpmath.mpf(measured(L)), mpmath.mpf(predicted(L))
            if p == 0:
                raise DomainError(f"predicted value is zero at L={L}")
            errs.append(abs(m - p) / (abs(p) * mpmath.exp(-eps * L)))
    tail = errs[-3:]
    if all(e == 0 for e in tail):
        passed = True
    else:
        passed = all(b < a for a, b in zip(tail, tail[1:]))
    return TildeReport(eps, L_list, [float(e) for e in errs], passed)


def measured_display(index: int, alpha: float, dps: int = reference.DEFAULT_DPS) -> Callable[[float], object]:
    """``L -> 2π r^{2(j+1)α} J^(j)_{P(r,1)}(r^α)`` in extended precision."""
    if index not in (0, 1, 2):
        raise DomainError("display index must be 0, 1 or 2")

    def f(L):
        return reference.canonical_j(alpha, L, dps)[index]

    return f


def predicted_display(index: int, alpha: float, A_mag: float = SYMMETRIC_A_MAG, dps: int = reference.DEFAULT_DPS):
    def f(L):
        with mpmath.workdps(dps):
            L_ = mpmath.mpf(L)
            a = mpmath.mpf(alpha)
            if index == 0:
                return 1 / L_
            b = j1_lead_L(L_, a, mpmath)
            if index == 1:
                return b
            return a_of_r_L(L_, a, mpmath.mpf(A_mag), mpmath) / b

    return f


# --------------------------------------------------------------------------
# Fitting the free coefficient
# --------------------------------------------------------------------------


class FitError(BergmanError, ArithmeticError):
    """The template fit is ill-conditioned for the chosen window."""


@dataclass(frozen=True)
class FitReport:
    estimate: float
    residual: float
    dominance: float
    exceeds_bound: bool
    points: List[tuple]


def fit_A_from_data(alphas: Sequence[float], Ls: Sequence[float], values: Sequence[float], min_dominance: float = 10.0) -> FitReport:
    """Least squares for ``A_mag`` in ``|A(r)| = t_r2 + A_mag t_free + t_r6a``.

    Rows are weighted by ``1/value`` so every point counts by relative error.
    ``dominance`` is the smallest ratio of the free term to the fixed ones.
    """
    alphas, Ls, values = (np.asarray(v, dtype=float) for v in (alphas, Ls, values))
    terms = np.array([_template_terms(L, a) for a, L in zip(alphas, Ls)])
    fixed = terms[:, 0] + terms[:, 2]
    x = terms[:, 1] / values
    y = (values - fixed) / values
    A = float(np.dot(x, y) / np.dot(x, x))
    resid = float(np.sqrt(np.mean((y - A * x) ** 2)))
    dominance = float(np.min(abs(A) * terms[:, 1] / fixed))
    if dominance < min_dominance:
        raise FitError(
            f"free term dominates the fixed ones only by {dominance:.3g} < {min_dominance}; "
            "choose alpha further inside (2/3, 1)"
        )
    pts = [(float(a), float(L), float(v)) for a, L, v in zip(alphas, Ls, values)]
    return FitReport(A, resid, dominance, A > 100.0, pts)


def fit_A(alpha_list: Sequence[float], L_list: Sequence[float], trunc: Truncation = Truncation()) -> FitReport:
    """Fit ``A_mag`` to the measured ``|c1|`` on every ``(alpha, L)`` pair."""
    for a in alpha_list:
        _check_alpha(a)
        if not a > 2.0 / 3.0:
            raise FitError(f"alpha={a} is outside (2/3, 1) where the free term dominates")
    alphas, Ls, vals = [], [], []
    for a in alpha_list:
        for L in L_list:
            log_c1, _ = numerator_lead_log(a, L, trunc)
            alphas.append(a)
            Ls.append(L)
            vals.append(math.exp(log_c1))
    return fit_A_from_data(alphas, Ls, vals)


def synthetic_values(alphas: Sequence[float], Ls: Sequence[float], A_mag: float) -> List[float]:
    return [a_of_r_L(L, a, A_mag) for a, L in zip(alphas, Ls)]


__all__ = [
    "AsymptoticPrediction",
    "DEFAULT_A_MAG",
    "FitError",
    "FitReport",
    "RateLaw",
    "RateStudy",
    "Regime",
    "SYMMETRIC_A_MAG",
    "TildeReport",
    "defect_times_inv_rate",
    "fit_A",
    "fit_A_from_data",
    "measured_display",
    "predicted_display",
    "predicted_leading",
    "predicted_leading_L",
    "rate_constant_study",
    "regime",
    "synthetic_values",
    "tilde_verify",
]
