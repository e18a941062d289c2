"""Certified construction of a disk with holes accumulating at the origin.

Stage ``k`` removes the closed disk ``Δ̄(θ^n, θ^{2n})`` and certifies two test
points near it: one where the curvature is close to 2 and one where it is
below ``-k``.  Certification sandwiches the domain between two concentric
rings around the hole and uses inclusion monotonicity of the J's, so each
interval is valid for every domain ``D'`` with
``P(c, ρ, d) ⊂ D' ⊂ P(c, ρ, 1)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .core import Truncation
from .errors import ConstructionError, DomainError
from .formatting import dumps
from .geometry import bergman_eval_log

ASSUMPTION = "finite-stage certificates only; Prop-1 limit step assumed"
X_ALPHA = 0.75
Y_ALPHA = 0.5
N_CEILING = 2000


@dataclass(frozen=True)
class Hole:
    n: int
    log_center: float
    log_radius: float

    @classmethod
    def from_theta(cls, theta: float, n: int) -> "Hole":
        lt = math.log(theta)
        return cls(n, n * lt, 2 * n * lt)

    @property
    def center(self) -> float:
        return math.exp(self.log_center)

    @property
    def radius(self) -> float:
        return math.exp(self.log_radius)


@dataclass(frozen=True)
class CurvatureInterval:
    lo: float
    hi: float

    def contains(self, x: float, rel: float = 0.0) -> bool:
        pad = rel * max(abs(self.lo), abs(self.hi))
        return self.lo - pad <= x <= self.hi + pad


@dataclass(frozen=True)
class Stage:
    hole: Hole
    log_x_offset: float  # log |x - center|
    log_y_offset: float
    log_clearance: float
    x_cert: Optional[CurvatureInterval] = None
    y_cert: Optional[CurvatureInterval] = None

    @property
    def x_point(self) -> float:
        return self.hole.center + math.exp(self.log_x_offset)

    @property
    def y_point(self) -> float:
        return self.hole.center + math.exp(self.log_y_offset)

    @property
    def clearance(self) -> float:
        return math.exp(self.log_clearance)


@dataclass(frozen=True)
class ZalcmanDomain:
    theta: float
    stages: List[Stage] = field(default_factory=list)
    assumption: str = ASSUMPTION


# --------------------------------------------------------------------------
# Sandwich bounds and the ratio check
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SandwichDetail:
    interval: CurvatureInterval
    small_curvature: float
    large_curvature: float


def sandwich_bounds_log(
    log_radius: float, log_clearance: float, log_rho: float, trunc: Truncation = Truncation()
) -> SandwichDetail:
    """Bounds from ``P(c, e^log_radius, e^log_clearance) ⊂ D ⊂ P(c, e^log_radius, 1)``."""
    if log_clearance > 0.0:
        raise DomainError("clearance must not exceed 1")
    if not log_radius < log_rho < log_clearance:
        raise DomainError("point is not inside the small sandwich annulus (need radius < |z-c| < d)")
    small = bergman_eval_log(log_radius, log_clearance, log_rho, trunc).j
    large = bergman_eval_log(log_radius, 0.0, log_rho, trunc).j
    lo = 2.0 - math.exp(small.log_j0 + small.log_j2 - 2.0 * large.log_j1)
    hi = 2.0 - math.exp(large.log_j0 + large.log_j2 - 2.0 * small.log_j1)
    return SandwichDetail(
        CurvatureInterval(lo, hi), 2.0 - small.defect, 2.0 - large.defect
    )


def sandwich_curvature_bounds(
    hole: Hole, clearance: float, z: complex, trunc: Truncation = Truncation()
) -> CurvatureInterval:
    rho = abs(complex(z) - hole.center)
    if not (rho > 0 and clearance > 0):
        raise DomainError("point is not inside the small sandwich annulus (need radius < |z-c| < d)")
    return sandwich_bounds_log(hole.log_radius, math.log(clearance), math.log(rho), trunc).interval


@dataclass(frozen=True)
class RatioReport:
    L: float
    s: float
    alpha: float
    eps: float
    ratios: Tuple[float, float, float]
    bound: float
    at_least_one: bool
    passed: bool


def ratio_bound_check(L: float, s: float, alpha: float, eps: float, trunc: Truncation = Truncation()) -> RatioReport:
    """Ratios ``J^(j)_{P(r,s)}(r^α) / J^(j)_{P(r,1)}(r^α)`` against ``[1, r^{-eps}]``.

    The numerator uses ``J_{P(r,s)}(r^α) = s^{-2(j+1)} J_{P(r/s,1)}(r^α/s)``.
    """
    if not 0.0 < s < 1.0:
        raise DomainError("need 0 < s < 1")
    if not (L > 0 and -L < math.log(s)):
        raise DomainError("need r = exp(-L) < s")
    log_s = math.log(s)
    log_rho = -alpha * L
    if not log_rho < log_s:
        raise DomainError("point r^alpha is not inside P(r, s)")
    inner = bergman_eval_log(-L - log_s, 0.0, log_rho - log_s, trunc).j.rescaled(log_s)
    outer = bergman_eval_log(-L, 0.0, log_rho, trunc).j
    ratios = tuple(
        math.exp(a - b)
        for a, b in zip(
            (inner.log_j0, inner.log_j1, inner.log_j2), (outer.log_j0, outer.log_j1, outer.log_j2)
        )
    )
    bound = math.exp(eps * L)
    ge1 = all(x >= 1.0 - 1e-12 for x in ratios)
    ok = ge1 and all(x <= bound for x in ratios)
    return RatioReport(L, s, alpha, eps, ratios, bound, ge1, ok)


# --------------------------------------------------------------------------
# Construction
# --------------------------------------------------------------------------


def first_admissible_n(theta: float) -> int:
    """Smallest ``n`` with ``θ^n + θ^{2n} < 1/4``."""
    n = 1
    while theta**n + theta ** (2 * n) >= 0.25:
        n += 1
    return n


def _stage_points(theta: float, n: int) -> Tuple[float, float]:
    lr = 2 * n * math.log(theta)
    return X_ALPHA * lr, Y_ALPHA * lr


def _free_radius(theta: float, prev: Optional[Hole]) -> float:
    """Radius about 0 of the disk that misses every earlier hole, capped at 1/4."""
    if prev is None:
        return 0.25
    return prev.center - prev.radius


def _clearance(hole: Hole, prev: Optional[Hole]) -> float:
    if prev is None:
        return math.log(0.25)
    free = prev.center - prev.radius
    return math.log(free - hole.center)


def certify_stage(
    theta: float, n: int, k: int, prev: Optional[Hole], slack: float, trunc: Truncation = Truncation()
) -> Tuple[Optional[Stage], str]:
    """Try candidate ``n`` for stage ``k``; return the stage or the failing inequality."""
    hole = Hole.from_theta(theta, n)
    free = _free_radius(theta, prev)
    if not hole.center + hole.radius < free * (1.0 - slack):
        return None, "geometry: theta^n + theta^(2n) < d*(1-slack)"
    log_d = _clearance(hole, prev)
    lx, ly = _stage_points(theta, n)
    if not (hole.log_radius < lx < log_d and hole.log_radius < ly < log_d):
        return None, "geometry: test points inside P(center, radius, d)"
    x = sandwich_bounds_log(hole.log_radius, log_d, lx, trunc).interval
    y = sandwich_bounds_log(hole.log_radius, log_d, ly, trunc).interval
    if not (2.0 - x.lo) * (1.0 + slack) < 1.0 / k:
        return None, f"x_cert.lo > 2 - 1/{k} (with slack)"
    if not (2.0 - y.hi) / (1.0 + slack) > 2.0 + k:
        return None, f"y_cert.hi < -{k} (with slack)"
    return Stage(hole, lx, ly, log_d, x, y), ""


def construct(
    theta: float, K: int, slack: float = 0.1, n_ceiling: int = N_CEILING, trunc: Truncation = Truncation()
) -> ZalcmanDomain:
    if not 0.0 < theta < 1.0:
        raise DomainError("theta must lie in (0, 1)")
    if K < 1:
        raise DomainError("need at least one stage")
    if not 0.0 <= slack < 1.0:
        raise DomainError("slack must lie in [0, 1)")
    stages: List[Stage] = []
    prev_n = first_admissible_n(theta)
    prev_hole: Optional[Hole] = None
    for k in range(1, K + 1):
        reason = "no candidate examined"
        stage = None
        for n in range(2 * prev_n + 1, n_ceiling + 1):
            stage, reason = certify_stage(theta, n, k, prev_hole, slack, trunc)
            if stage is not None:
                break
        if stage is None:
            raise ConstructionError(
                f"stage {k}: no n <= {n_ceiling} certified; last failing inequality: {reason}",
                stage=k,
                inequality=reason,
            )
        stages.append(stage)
        prev_n = stage.hole.n
        prev_hole = stage.hole
    return ZalcmanDomain(theta, stages)


def domain_from_holes(theta: float, ns: List[int]) -> ZalcmanDomain:
    """Uncertified domain with the default points and clearances, for geometry checks."""
    stages = []
    prev = None
    for n in ns:
        hole = Hole.from_theta(theta, n)
        lx, ly = _stage_points(theta, n)
        free = _free_radius(theta, prev)
        log_d = math.log(free - hole.center) if prev is not None and free > hole.center else (
            math.log(0.25) if prev is None else -math.inf
        )
        stages.append(Stage(hole, lx, ly, log_d))
        prev = hole
    return ZalcmanDomain(theta, stages)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: List[str]

    @property
    def first(self) -> Optional[str]:
        return self.violations[0] if self.violations else None


def _sum_lt_one(logs: List[float]) -> bool:
    """``sum(exp(logs)) < 1`` without overflow or underflow trouble."""
    return math.fsum(math.exp(min(v, 1.0)) for v in logs) < 1.0


def validate_geometry(dom: ZalcmanDomain, check_certificates: bool = True) -> ValidationReport:
    v: List[str] = []
    if not 0.0 < dom.theta < 1.0:
        v.append("theta outside (0, 1)")
    lt = math.log(dom.theta) if 0.0 < dom.theta < 1.0 else math.nan
    ns = [s.hole.n for s in dom.stages]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        v.append(f"hole exponents not strictly increasing: {ns}")
    for k, st in enumerate(dom.stages, start=1):
        h = st.hole
        if not math.isclose(h.log_center, h.n * lt, rel_tol=1e-12):
            v.append(f"stage {k}: hole centre is not theta^n")
        if not math.isclose(h.log_radius, 2 * h.n * lt, rel_tol=1e-12):
            v.append(f"stage {k}: hole radius is not theta^(2n)")
        if not h.log_radius < h.log_center:
            v.append(f"stage {k}: hole contains the origin")
        if not h.center + h.radius < 0.5:
            v.append(f"stage {k}: hole not inside the disk of radius 1/2")
        for name, lo in (("x", st.log_x_offset), ("y", st.log_y_offset)):
            if not h.log_radius < lo < st.log_clearance:
                v.append(f"stage {k}: {name} point not inside P(center, radius, clearance)")
        if check_certificates and st.x_cert is not None and st.y_cert is not None:
            for name, c in (("x", st.x_cert), ("y", st.y_cert)):
                if not (c.lo <= c.hi < 2.0):
                    v.append(f"stage {k}: {name}_cert is not an interval below 2")
            if not st.x_cert.lo > 2.0 - 1.0 / k:
                v.append(f"stage {k}: x_cert.lo <= 2 - 1/{k}")
            if not st.y_cert.hi < -k:
                v.append(f"stage {k}: y_cert.hi >= -{k}")
    for i in range(len(dom.stages)):
        for j in range(i + 1, len(dom.stages)):
            a, b = dom.stages[i].hole, dom.stages[j].hole
            big, small = (a, b) if a.log_center >= b.log_center else (b, a)
            # |c_big - c_small| > r_big + r_small, divided through by c_big.
            rel = [small.log_center - big.log_center, big.log_radius - big.log_center,
                   small.log_radius - big.log_center]
            if not _sum_lt_one(rel):
                v.append(f"holes n={a.n} and n={b.n} intersect (disjointness violated)")
    return ValidationReport(not v, v)


# --------------------------------------------------------------------------
# One-hole exact check
# --------------------------------------------------------------------------


def one_hole_curvature(
    outer_radius: float, center: float, radius: float, log_offset: float, trunc: Truncation = Truncation()
) -> float:
    """Curvature of ``Δ(0, R0) \\ Δ̄(c, ρ0)`` at ``c + e^log_offset`` (on the real axis).

    The Möbius map ``T(w) = (w - p1)/(w - p2)`` with ``p1``, ``p2`` symmetric
    for both circles sends the domain onto a concentric ring; curvature is
    invariant under biholomorphisms.
    """
    R0, c, rho0 = outer_radius, center, radius
    if not (0 < c and 0 < rho0 and c + rho0 < R0):
        raise DomainError("hole must lie inside the outer disk")
    S = (R0 * R0 + c * c - rho0 * rho0) / c
    p2 = 0.5 * (S + math.sqrt(S * S - 4.0 * R0 * R0))
    delta = rho0 * rho0 / (p2 - c)  # p1 - c
    off = math.exp(log_offset)
    w = c + off
    if not (rho0 < off and w < R0):
        raise DomainError("point is not in the one-hole domain on the positive axis")
    log_in = math.log(rho0) - math.log(p2 - c)
    log_out = math.log(R0) - math.log(p2)
    log_t = math.log(off - delta) - math.log(p2 - w)
    return bergman_eval_log(log_in, log_out, log_t, trunc).curvature


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def _interval(c: Optional[CurvatureInterval]):
    if c is None:
        return None
    return {"lo": float(c.lo), "hi": float(c.hi)}


def to_dict(dom: ZalcmanDomain) -> dict:
    return {
        "theta": float(dom.theta),
        "assumption": dom.assumption,
        "stages": [
            {
                "n": st.hole.n,
                "hole": {"center": st.hole.center, "log_radius": st.hole.log_radius},
                "x": st.x_point,
                "y": st.y_point,
                "clearance": st.clearance,
                "x_cert": _interval(st.x_cert),
                "y_cert": _interval(st.y_cert),
            }
            for st in dom.stages
        ],
    }


def to_json(dom: ZalcmanDomain) -> str:
    return dumps(to_dict(dom)) + "\n"


def _log_offset(point: float, center: float) -> float:
    d = point - center
    return math.log(d) if d > 0 else -math.inf


def from_dict(data: dict) -> ZalcmanDomain:
    theta = float(data["theta"])
    stages = []
    for st in data["stages"]:
        n = int(st["n"])
        c = float(st["hole"]["center"])
        log_c = math.log(c) if c > 0 else n * math.log(theta)
        hole = Hole(n, log_c, float(st["hole"]["log_radius"]))
        certs = [
            CurvatureInterval(float(st[k]["lo"]), float(st[k]["hi"])) if st.get(k) else None
            for k in ("x_cert", "y_cert")
        ]
        clear = float(st["clearance"])
        stages.append(
            Stage(
                hole,
                _log_offset(float(st["x"]), c),
                _log_offset(float(st["y"]), c),
                math.log(clear) if clear > 0 else -math.inf,
                certs[0],
                certs[1],
            )
        )
    return ZalcmanDomain(theta, stages, data.get("assumption", ASSUMPTION))


def from_json(text: str) -> ZalcmanDomain:
    return from_dict(json.loads(text))
