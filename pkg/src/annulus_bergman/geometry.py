"""Kernel, metric and curvature of arbitrary centred rings at arbitrary points.

A query ``(P(c, r, R), z)`` is reduced to the canonical ring at 1 by
translating ``c`` to 0, rotating ``z`` onto the positive axis and dilating by
``rho = |z - c|``.  Translations and rotations leave every ``J^(j)``
unchanged; the dilation multiplies ``J^(j)`` by ``rho**(-2(j+1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .core import Annulus, JTriple, Truncation, j_triple_at_one, safe_exp
from .errors import DomainError


@dataclass(frozen=True)
class BergmanEval:
    j: JTriple
    kernel: float
    metric_sq: float
    curvature: float
    defect: float
    alpha: float
    L: float
    log_scale: float

    @property
    def terms_used(self) -> int:
        return self.j.terms_used


def normalize_log(log_inner: float, log_outer: float, log_rho: float) -> Tuple[float, float, float]:
    """``(alpha, L, log_scale)`` for the point at distance ``exp(log_rho)``."""
    if not (math.isfinite(log_inner) and math.isfinite(log_outer)):
        raise DomainError("ring radii must be positive and finite")
    if not log_inner < log_outer:
        raise DomainError("inner radius must be strictly smaller than the outer radius")
    if not log_rho > log_inner:
        raise DomainError("point is not strictly outside the inner circle (|z-c| <= r)")
    if not log_rho < log_outer:
        raise DomainError("point is not strictly inside the outer circle (|z-c| >= R)")
    L = log_outer - log_inner
    alpha = (log_outer - log_rho) / L
    return alpha, L, log_rho


def normalize(ann: Annulus, z: complex) -> Tuple[float, float, float]:
    """``(alpha, L, scale)`` with ``J_ann(z) = scale**(-2(j+1)) J_canonical(1)``."""
    rho = abs(complex(z) - ann.center)
    if rho == 0.0:
        raise DomainError("point is not strictly outside the inner circle (|z-c| <= r)")
    alpha, L, log_scale = normalize_log(ann.log_r_inner, ann.log_r_outer, math.log(rho))
    return alpha, L, rho


def _assemble(j: JTriple, alpha: float, L: float, log_scale: float) -> BergmanEval:
    defect = j.defect
    return BergmanEval(
        j=j,
        kernel=j.j0,
        metric_sq=safe_exp(j.log_j1 - j.log_j0),
        curvature=2.0 - defect,
        defect=defect,
        alpha=alpha,
        L=L,
        log_scale=log_scale,
    )


def bergman_eval_log(
    log_inner: float, log_outer: float, log_rho: float, trunc: Truncation = Truncation()
) -> BergmanEval:
    """Evaluate on ``P(0, e^log_inner, e^log_outer)`` at distance ``e^log_rho``."""
    alpha, L, log_scale = normalize_log(log_inner, log_outer, log_rho)
    canonical = j_triple_at_one(alpha, L, trunc)
    return _assemble(canonical.rescaled(log_scale), alpha, L, log_scale)


def bergman_eval(ann: Annulus, z: complex, trunc: Truncation = Truncation()) -> BergmanEval:
    rho = abs(complex(z) - ann.center)
    if rho == 0.0:
        raise DomainError("point is not strictly outside the inner circle (|z-c| <= r)")
    return bergman_eval_log(ann.log_r_inner, ann.log_r_outer, math.log(rho), trunc)


def canonical_eval(alpha: float, L: float, trunc: Truncation = Truncation()) -> BergmanEval:
    """Evaluate on ``P(r, 1)`` at ``r**alpha`` with ``r = exp(-L)``."""
    return bergman_eval_log(-L, 0.0, -alpha * L, trunc)


# --------------------------------------------------------------------------
# Inclusion monotonicity and exhaustion studies
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityReport:
    q_small_domain: float
    q_large_domain: float
    z: complex
    log_j_small: Tuple[float, float, float]
    log_j_large: Tuple[float, float, float]
    holds: bool


def _logs(e: BergmanEval) -> Tuple[float, float, float]:
    return (e.j.log_j0, e.j.log_j1, e.j.log_j2)


def inclusion_monotonicity_check(
    q1: float, q2: float, z: complex, trunc: Truncation = Truncation(), slack: float = 1e-12
) -> MonotonicityReport:
    """Compare J's on ``P(q1, 1) ⊂ P(q2, 1)`` (``q1 >= q2``) at ``z``."""
    if q1 < q2:
        raise DomainError("need q1 >= q2 so that P(q1,1) is the smaller ring")
    small = _logs(bergman_eval(Annulus.from_radii(q1, 1.0), z, trunc))
    large = _logs(bergman_eval(Annulus.from_radii(q2, 1.0), z, trunc))
    holds = all(s >= l + math.log1p(-slack) for s, l in zip(small, large))
    return MonotonicityReport(q1, q2, complex(z), small, large, holds)


@dataclass(frozen=True)
class ExhaustionRow:
    nu: int
    q: float
    rel_errors: Tuple[float, float, float]


@dataclass(frozen=True)
class ExhaustionStudy:
    mode: str
    target_q: float
    rows: List[ExhaustionRow]
    monotone: bool
    converged: bool


def exhaustion_sequence(mode: str, q: float, steps: int) -> List[float]:
    if mode == "increasing":
        return [q * (1.0 + 2.0**-nu) for nu in range(1, steps + 1)]
    if mode == "general-exhaustion":
        return [q * (1.0 + (-1) ** nu * 2.0**-nu) for nu in range(1, steps + 1)]
    if mode == "constant":
        return [q] * steps
    raise DomainError(f"unknown exhaustion mode {mode!r}")


def prop1_exhaustion_study(
    mode: str,
    q: float,
    z: complex,
    steps: int = 40,
    trunc: Truncation = Truncation(),
    qs: Sequence[float] = None,
    tol: float = 1e-8,
) -> ExhaustionStudy:
    """Relative deviation of ``J^(j)_{P(q_nu, 1)}(z)`` from ``J^(j)_{P(q, 1)}(z)``.

    ``monotone`` reports whether every ``J^(j)`` is non-increasing along the
    sequence, which inclusion monotonicity forces when the rings grow.
    """
    if qs is None:
        qs = exhaustion_sequence(mode, q, steps)
    rho = abs(complex(z))
    for qn in qs:
        if not qn < rho < 1.0:
            raise DomainError(f"ring P({qn!r}, 1) does not contain z")
    target = _logs(bergman_eval(Annulus.from_radii(q, 1.0), z, trunc))
    rows = []
    prev = None
    monotone = True
    for nu, qn in enumerate(qs, start=1):
        cur = _logs(bergman_eval(Annulus.from_radii(qn, 1.0), z, trunc))
        errs = tuple(abs(math.expm1(c - t)) for c, t in zip(cur, target))
        rows.append(ExhaustionRow(nu, qn, errs))
        if prev is not None and any(c > p + 1e-13 for c, p in zip(cur, prev)):
            monotone = False
        prev = cur
    converged = max(rows[-1].rel_errors) <= tol
    return ExhaustionStudy(mode, q, rows, monotone, converged)
