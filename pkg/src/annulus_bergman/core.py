"""Extremal quantities J^(0), J^(1), J^(2) of a ring at the point 1.

The canonical geometry is the ring ``P(r**(1-alpha), r**(-alpha))`` with
``r = exp(-L)``; the point 1 sits at relative position ``alpha`` between the
two boundary circles.  Every other ring/point pair reduces to this one by a
similarity (see :mod:`annulus_bergman.geometry`).

Three evaluation routes are provided:

* the *naive* quotients of the moment sums ``phi(j)``,
* the *expanded* quotients, where the powers of ``1/L`` that cancel
  identically have been removed symbolically (:mod:`.expansion`),
* the *canonical* route used for all reported values: Hankel determinants of
  the discrete weight measure written as sums of positive terms
  (Lagrange / Cauchy-Binet identities) and accumulated in the log domain.

Only the canonical route is free of cancellation for every ``(alpha, L)``;
the other two exist for cross-checking.  Internal moment sums follow the
``2*pi``-free convention; the factor is restored on every ``J`` returned.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from . import expansion
from .errors import ConvergenceError, DomainError, InternalInconsistencyError

TWO_PI = 2.0 * math.pi
LOG_TWO_PI = math.log(TWO_PI)
_LOG2 = math.log(2.0)


def safe_exp(x: float) -> float:
    """``exp`` that saturates to ``inf``/0 instead of raising."""
    if x > 709.0:
        return math.inf
    return math.exp(x)


def _lse(x, axis=None):
    """log-sum-exp tolerant of rows that are entirely ``-inf``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        m = np.max(x, axis=axis, keepdims=True)
        m = np.where(np.isfinite(m), m, 0.0)
        s = np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)) + m
    if axis is None:
        return float(s.reshape(()))
    return np.squeeze(s, axis=axis)


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Annulus:
    """Ring ``{λ : r < |λ - center| < R}`` stored through ``log r`` and ``log R``."""

    log_r_inner: float
    log_r_outer: float
    center: complex = 0j

    def __post_init__(self):
        if not (math.isfinite(self.log_r_inner) and math.isfinite(self.log_r_outer)):
            raise DomainError("annulus radii must be positive and finite")
        if not self.log_r_inner < self.log_r_outer:
            raise DomainError(
                "inner radius must be strictly smaller than the outer radius"
            )
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def from_radii(cls, inner: float, outer: float, center: complex = 0j) -> "Annulus":
        if not (inner > 0 and outer > 0):
            raise DomainError("radii must be positive")
        return cls(math.log(inner), math.log(outer), center)

    @property
    def inner(self) -> float:
        return math.exp(self.log_r_inner)

    @property
    def outer(self) -> float:
        return math.exp(self.log_r_outer)

    @property
    def L(self) -> float:
        """``-log`` of the modulus ratio inner/outer."""
        return self.log_r_outer - self.log_r_inner


@dataclass(frozen=True)
class Truncation:
    """Termination policy for the two-sided Laurent sums."""

    rel_tol: float = 1e-14
    n_min: int = 8
    n_max: int = 100_000
    compensated: bool = True

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError("rel_tol must lie in (0, 1)")
        if not 0 < self.n_min <= self.n_max:
            raise DomainError("need 0 < n_min <= n_max")


@dataclass(frozen=True)
class PhiTable:
    alpha: float
    L: float
    psi: Tuple[float, ...]
    phi: Tuple[float, ...]
    terms_used: int
    tail_bound: float


@dataclass(frozen=True)
class ExtremalShift:
    beta: float
    gamma: float


@dataclass(frozen=True)
class JTriple:
    """``J^(0..2)`` held as natural logs; values may exceed the float range."""

    log_j0: float
    log_j1: float
    log_j2: float
    discrepancy: float = math.nan
    terms_used: int = 0

    @property
    def j0(self) -> float:
        return safe_exp(self.log_j0)

    @property
    def j1(self) -> float:
        return safe_exp(self.log_j1)

    @property
    def j2(self) -> float:
        return safe_exp(self.log_j2)

    @property
    def log_defect(self) -> float:
        return self.log_j0 + self.log_j2 - 2.0 * self.log_j1

    @property
    def defect(self) -> float:
        return safe_exp(self.log_defect)

    def rescaled(self, log_scale: float) -> "JTriple":
        """Apply ``J^(j) -> scale**(-2(j+1)) J^(j)``."""
        return JTriple(
            self.log_j0 - 2.0 * log_scale,
            self.log_j1 - 4.0 * log_scale,
            self.log_j2 - 6.0 * log_scale,
            self.discrepancy,
            self.terms_used,
        )


# --------------------------------------------------------------------------
# Monomial norms
# --------------------------------------------------------------------------


def log_alpha_norm(n: int, log_r: float, log_R: float) -> float:
    """``log ||λ^n||^2`` on ``P(r, R)``, evaluated without forming ``r**n``."""
    if not (math.isfinite(log_r) and math.isfinite(log_R)):
        raise DomainError("log radii must be finite")
    if not log_r < log_R:
        raise DomainError("need log_r < log_R")
    if n == -1:
        return LOG_TWO_PI + math.log(log_R - log_r)
    m = 2 * (n + 1)
    top = log_R if m > 0 else log_r
    delta = log_R - log_r
    return LOG_TWO_PI + m * top + math.log(-math.expm1(-abs(m) * delta)) - math.log(abs(m))


def alpha_norm(n: int, log_r: float, log_R: float) -> float:
    """Squared L2 norm of ``λ^n`` on the centred ring ``P(e^log_r, e^log_R)``.

    The ``2π`` of the angular integral is kept, so ``alpha_norm(0, ...)`` is
    the ring's area.
    """
    return safe_exp(log_alpha_norm(n, log_r, log_R))


# --------------------------------------------------------------------------
# The canonical weight measure
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalMeasure:
    """Weights ``1/alpha_n`` (2π-free) on the shifted lattice ``k = n + 1``.

    The atom ``k = 0`` carries ``1/L``; ``k >= 1`` come from ``n >= 0`` and
    decay like ``r**(2kα)``; ``k <= -1`` come from ``n <= -2`` and decay like
    ``r**(2|k|(1-α))``.
    """

    alpha: float
    L: float
    ks: np.ndarray = field(repr=False)
    log_w: np.ndarray = field(repr=False)
    terms_used: int
    tail_bound: float


def _check_alpha_L(alpha: float, L: float):
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not (math.isfinite(L) and L > 0.0):
        raise DomainError(f"L must be positive and finite, got {L!r}")


def _family_log_w(m: np.ndarray, exponent: float, L: float) -> np.ndarray:
    return np.log(2.0 * m) - 2.0 * m * exponent * L - np.log(-np.expm1(-2.0 * m * L))


@functools.lru_cache(maxsize=4096)
def canonical_measure(alpha: float, L: float, trunc: Truncation = Truncation()) -> CanonicalMeasure:
    """Truncated weight measure for the canonical ring.

    Each family stops at the first ``m >= n_min`` past its peak whose
    fourth-moment term ``w_m (m+1)^4`` is below ``rel_tol`` times both the
    family's partial sum and the third largest weight seen so far (the
    latter bounds the relative truncation error of the second-order
    Hankel determinant).
    """
    _check_alpha_L(alpha, L)
    log_tol = math.log(trunc.rel_tol)
    atom = -math.log(L)
    exponents = (alpha, 1.0 - alpha)

    logs = [np.empty(0), np.empty(0)]
    stop = [None, None]
    top3 = [atom]
    block = 64
    start = 1
    while any(s is None for s in stop):
        if start > trunc.n_max:
            last = max(
                float(logs[i][-1] + 4 * math.log(len(logs[i]) + 1))
                for i in range(2)
                if stop[i] is None
            )
            raise ConvergenceError(
                f"series not converged after n_max={trunc.n_max} terms "
                f"(last weighted term {safe_exp(last):.3e})",
                last_term=safe_exp(last),
            )
        end = min(start + block, trunc.n_max + 1)
        m = np.arange(start, end, dtype=float)
        for i in range(2):
            if stop[i] is None:
                logs[i] = np.concatenate([logs[i], _family_log_w(m, exponents[i], L)])
        top3 = sorted(
            top3 + [float(v) for i in range(2) for v in np.sort(logs[i])[-3:]],
            reverse=True,
        )[:3]
        log_w3 = top3[-1]
        for i in range(2):
            if stop[i] is not None:
                continue
            lw = logs[i]
            mm = np.arange(1, len(lw) + 1, dtype=float)
            t = lw + 4.0 * np.log(mm + 1.0)
            partial = np.logaddexp.accumulate(lw)
            ref = np.minimum(partial, log_w3)
            decreasing = np.concatenate([[False], np.diff(t) < 0])
            ok = (mm >= trunc.n_min) & decreasing & (t <= log_tol + ref)
            hit = np.flatnonzero(ok)
            if hit.size:
                stop[i] = int(hit[0]) + 1
        start = end
        block *= 2

    tail = 0.0
    for i in range(2):
        M = stop[i]
        nxt = _family_log_w(np.array([M + 1.0, M + 2.0]), exponents[i], L)
        t1 = nxt[0] + 4.0 * math.log(M + 2.0)
        t2 = nxt[1] + 4.0 * math.log(M + 3.0)
        ratio = math.exp(min(t2 - t1, 0.0))
        tail += safe_exp(t1) / (1.0 - ratio) if ratio < 1.0 else math.inf
        logs[i] = logs[i][:M]

    mp, mn = stop
    ks = np.concatenate(
        [-np.arange(mn, 0, -1), [0], np.arange(1, mp + 1)]
    ).astype(np.int64)
    log_w = np.concatenate([logs[1][::-1], [atom], logs[0]])
    ks.setflags(write=False)
    log_w.setflags(write=False)
    return CanonicalMeasure(alpha, L, ks, log_w, mp + mn + 1, tail)


# --------------------------------------------------------------------------
# Positive-term Hankel determinants in the log domain
# --------------------------------------------------------------------------


def _one_sided_log_moments(ks: np.ndarray, log_w: np.ndarray, powers, side: str):
    """``log sum_{a<b} w_a (k_b-k_a)^p`` (side='left') or the mirror sum over
    ``c > b`` (side='right'), for every index ``b`` and every ``p``."""
    n = len(ks)
    kf = ks.astype(float)
    out = {p: np.full(n, -np.inf) for p in powers}
    rows = max(1, 2_000_000 // max(n, 1))
    for b0 in range(0, n, rows):
        b = slice(b0, min(n, b0 + rows))
        if side == "left":
            d = kf[b, None] - kf[None, :]
        else:
            d = kf[None, :] - kf[b, None]
        with np.errstate(divide="ignore"):
            logd = np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), -np.inf)
        for p in powers:
            out[p][b] = _lse(log_w[None, :] + p * logd, axis=1)
    return out


def log_hankel_dets(ks: np.ndarray, log_w: np.ndarray) -> Tuple[float, float, float]:
    """Log of the 1x1, 2x2 and 3x3 Hankel moment determinants of the measure.

    ``det2 = sum_{a<b} w_a w_b (a-b)^2`` and
    ``det3 = sum_{a<b<c} w_a w_b w_c (a-b)^2 (a-c)^2 (b-c)^2``; with the middle
    index ``b`` fixed and ``d1 = b-a``, ``d2 = c-b`` the triple weight is
    ``d1^4 d2^2 + 2 d1^3 d2^3 + d1^2 d2^4``, so both are sums of positive terms.
    """
    left = _one_sided_log_moments(ks, log_w, (2, 3, 4), "left")
    right = _one_sided_log_moments(ks, log_w, (2, 3, 4), "right")
    log_d1 = _lse(log_w)
    log_d2 = _lse(log_w + left[2])
    inner = np.logaddexp.reduce(
        np.vstack(
            [left[4] + right[2], _LOG2 + left[3] + right[3], left[2] + right[4]]
        ),
        axis=0,
    )
    log_d3 = _lse(log_w + inner)
    return log_d1, log_d2, log_d3


def numerator_lead_log(alpha: float, L: float, trunc: Truncation = Truncation()) -> Tuple[float, float]:
    """``(log|c1|, log S)`` in the 2π-free convention.

    ``c1`` is the ``1/L`` coefficient of the second-order numerator and
    ``S = psi(2) + 2 psi(1) + psi(0)`` the ``1/L`` coefficient of the
    denominator (up to sign).  Both are the Hankel data of the weights
    ``w_k k^2`` with the atom removed: ``S`` is their mass and ``|c1|`` their
    2x2 determinant.
    """
    meas = canonical_measure(alpha, L, trunc)
    keep = meas.ks != 0
    ks = meas.ks[keep]
    lw = meas.log_w[keep] + 2.0 * np.log(np.abs(ks).astype(float))
    left = _one_sided_log_moments(ks, lw, (2,), "left")
    return _lse(lw + left[2]), _lse(lw)


# --------------------------------------------------------------------------
# Moment table and the naive / expanded routes
# --------------------------------------------------------------------------


def _sum(values, compensated: bool) -> float:
    return math.fsum(values) if compensated else float(sum(values))


def phi_psi_table(alpha: float, L: float, trunc: Truncation = Truncation()) -> PhiTable:
    """Moment sums ``psi(0..4)`` and ``phi(j) = (-1)^j/L + psi(j)`` (2π-free)."""
    meas = canonical_measure(alpha, L, trunc)
    keep = meas.ks != 0
    w = np.exp(meas.log_w[keep])
    n = [int(k) - 1 for k in meas.ks[keep]]
    psi = []
    for j in range(5):
        psi.append(_sum([wi * float(ni**j) for wi, ni in zip(w, n)], trunc.compensated))
    phi = tuple((-1) ** j / L + psi[j] for j in range(5))
    return PhiTable(alpha, L, tuple(psi), phi, meas.terms_used, meas.tail_bound)


def denominator_expanded(t: PhiTable) -> float:
    """``phi(1)^2 - phi(2) phi(0)`` with the ``1/L^2`` part removed exactly."""
    return (
        expansion.evaluate(expansion.DENOMINATOR_C1, t.psi) / t.L
        + expansion.evaluate(expansion.DENOMINATOR_C0, t.psi)
    )


def j2_numerator_expanded(t: PhiTable) -> float:
    """Second-order numerator as ``c1(psi)/L + c0(psi)``."""
    return (
        expansion.evaluate(expansion.NUMERATOR_C1, t.psi) / t.L
        + expansion.evaluate(expansion.NUMERATOR_C0, t.psi)
    )


def j2_numerator_naive(t: PhiTable) -> float:
    p = t.phi
    return (
        p[4] * p[1] ** 2
        - p[4] * p[2] * p[0]
        - 2.0 * p[3] * p[2] * p[1]
        + p[3] ** 2 * p[0]
        + p[2] ** 3
    )


def extremal_shift(t: PhiTable) -> ExtremalShift:
    """Solve the 2x2 normal equations for the shifts ``beta``, ``gamma``."""
    den = denominator_expanded(t)
    if not den < 0.0:
        raise InternalInconsistencyError(
            f"phi(1)^2 - phi(2)phi(0) = {den!r} is not negative"
        )
    u = 1.0 / t.L
    bnum = expansion.evaluate(expansion.BETA_C1, t.psi) * u + expansion.evaluate(
        expansion.BETA_C0, t.psi
    )
    gnum = expansion.evaluate(expansion.GAMMA_C1, t.psi) * u + expansion.evaluate(
        expansion.GAMMA_C0, t.psi
    )
    return ExtremalShift(bnum / den, gnum / den)


def naive_j(t: PhiTable) -> Tuple[float, float, float]:
    """J's from the plain moment quotients, 2π restored."""
    p = t.phi
    j1 = (p[2] * p[0] - p[1] ** 2) / p[0]
    den = p[1] ** 2 - p[2] * p[0]
    j2 = j2_numerator_naive(t) / den if den != 0.0 else math.nan
    return p[0] / TWO_PI, j1 / TWO_PI, j2 / TWO_PI


def expanded_j(t: PhiTable) -> Tuple[float, float, float]:
    """J's from the symbolically expanded quotients, 2π restored."""
    den = denominator_expanded(t)
    return t.phi[0] / TWO_PI, -den / t.phi[0] / TWO_PI, j2_numerator_expanded(t) / den / TWO_PI


def canonical_log_j(alpha: float, L: float, trunc: Truncation = Truncation()) -> Tuple[float, float, float]:
    meas = canonical_measure(alpha, L, trunc)
    d1, d2, d3 = log_hankel_dets(meas.ks, meas.log_w)
    return d1 - LOG_TWO_PI, d2 - d1 - LOG_TWO_PI, d3 - d2 - LOG_TWO_PI


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def j_triple_at_one(alpha: float, L: float, trunc: Truncation = Truncation()) -> JTriple:
    """J^(0..2) of ``P(r**(1-alpha), r**(-alpha))`` at 1, ``r = exp(-L)``.

    The naive quotients are evaluated alongside; ``discrepancy`` is their
    largest relative deviation from the returned values (``nan`` once the
    naive route breaks down entirely).
    """
    lj = canonical_log_j(alpha, L, trunc)
    if not all(math.isfinite(v) for v in lj):
        raise InternalInconsistencyError(f"non-finite log J at alpha={alpha}, L={L}: {lj}")
    meas = canonical_measure(alpha, L, trunc)
    disc = math.nan
    if lj[2] > -700.0:
        nv = naive_j(phi_psi_table(alpha, L, trunc))
        if all(v > 0 and math.isfinite(v) for v in nv):
            disc = max(_rel(nv[i], math.exp(lj[i])) for i in range(3))
    return JTriple(lj[0], lj[1], lj[2], disc, meas.terms_used)
