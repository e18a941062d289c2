"""Independent check: solve the extremal problems directly on a Laurent window.

The Gram matrix of ``λ^n`` over the ring is built by tensor quadrature in
``(u, θ)`` with ``u = log|λ - c|``: Gauss-Legendre panels in ``u`` and the
trapezoid rule in ``θ``.  Nothing here uses the closed-form monomial norms,
so agreement with :mod:`.geometry` is a genuine cross-check.

All matrices are stored Jacobi-scaled (unit diagonal) with the scale kept in
log form, which keeps windows like ``n = -60..60`` on ``q = 0.02`` finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .core import Annulus, JTriple, _lse
from .errors import DomainError, InternalInconsistencyError, OracleEnvelopeError, QuadratureError
from .geometry import BergmanEval, _assemble, normalize_log

Q_MIN, Q_MAX = 0.02, 0.9
N_MIN, N_MAX = 4, 60
PANEL_ORDER = 64


@dataclass(frozen=True)
class GramSystem:
    ann: Annulus
    basis_lo: int
    basis_hi: int
    gram: np.ndarray = field(repr=False)  # scaled: unit diagonal
    log_diag: np.ndarray = field(repr=False)  # log of the unscaled diagonal
    radial_nodes: int
    angular_nodes: int

    @property
    def exponents(self) -> np.ndarray:
        return np.arange(self.basis_lo, self.basis_hi + 1)

    @property
    def size(self) -> int:
        return self.basis_hi - self.basis_lo + 1

    def unscaled(self) -> np.ndarray:
        """Raw inner products ``<λ^m, λ^n>``; may overflow for wide windows."""
        s = np.exp(0.5 * self.log_diag)
        return self.gram * np.outer(s, s)


def check_envelope(ann: Annulus, N: int):
    q = math.exp(-ann.L)
    if not Q_MIN <= q <= Q_MAX:
        raise OracleEnvelopeError(
            f"modulus ratio r/R = {q:.3g} is outside the oracle envelope [{Q_MIN}, {Q_MAX}]"
        )
    if not N_MIN <= N <= N_MAX:
        raise OracleEnvelopeError(f"basis size N = {N} is outside [{N_MIN}, {N_MAX}]")


def balanced_window(ann: Annulus, log_rho: float, N: int) -> Tuple[int, int]:
    """``2N+1`` consecutive exponents around ``-1``, split by decay rate.

    Mode ``n`` contributes roughly ``(ρ/R)^{2n}`` for ``n >= 0`` and
    ``(r/ρ)^{2|n+1|}`` below, so the window leans towards the slower side.
    Successive ``N`` give nested windows.
    """
    rate_pos = 2.0 * (ann.log_r_outer - log_rho)
    rate_neg = 2.0 * (log_rho - ann.log_r_inner)
    b = int(math.floor(2 * N * rate_neg / (rate_pos + rate_neg)))
    return -1 - (2 * N - b), -1 + b


def _radial_rule(a: float, b: float, n_total: int) -> Tuple[np.ndarray, np.ndarray]:
    panels = max(1, math.ceil(n_total / PANEL_ORDER))
    order = math.ceil(n_total / panels)
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    return u, wu


def _default_radial_nodes(ann: Annulus, lo: int, hi: int) -> int:
    # Keep |s| * panel_half_width <= 12 for the steepest exponential e^{s u}.
    s_max = max(abs(2 * lo + 2), abs(2 * hi + 2), 1)
    panels = max(1, math.ceil(s_max * ann.L / 24.0))
    return PANEL_ORDER * panels


def _cholesky(H: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises QuadratureError naming the failing pivot."""
    n = H.shape[0]
    Lf = np.zeros_like(H)
    for k in range(n):
        d = H[k, k].real - np.vdot(Lf[k, :k], Lf[k, :k]).real
        if not d > 0.0:
            raise QuadratureError(f"Gram matrix not positive definite at pivot {k}", pivot=k)
        Lf[k, k] = math.sqrt(d)
        if k + 1 < n:
            Lf[k + 1 :, k] = (H[k + 1 :, k] - Lf[k + 1 :, :k] @ Lf[k, :k].conj()) / Lf[k, k]
    return Lf


def _cholesky_with_ridge(H: np.ndarray) -> np.ndarray:
    try:
        return _cholesky(H)
    except QuadratureError:
        ridge = 1e-14 * float(np.trace(H).real)
        try:
            return _cholesky(H + ridge * np.eye(H.shape[0]))
        except QuadratureError as exc:
            raise QuadratureError(
                f"quadrature too coarse: {exc} (after ridge {ridge:.3g})", pivot=exc.pivot
            ) from None


def build_gram(
    ann: Annulus,
    N: int = 40,
    radial_nodes: Optional[int] = None,
    angular_nodes: Optional[int] = None,
    window: Optional[Tuple[int, int]] = None,
    check: bool = True,
) -> GramSystem:
    """Quadrature Gram matrix on exponents ``window`` (default ``[-N, N]``)."""
    if check:
        check_envelope(ann, N)
    lo, hi = window if window is not None else (-N, N)
    if hi < lo:
        raise DomainError("empty Laurent window")
    span = hi - lo
    if radial_nodes is None:
        radial_nodes = _default_radial_nodes(ann, lo, hi)
    if angular_nodes is None:
        angular_nodes = max(4 * N + 4, 2 * span + 4)
    if radial_nodes < 64:
        raise DomainError("radial_nodes must be at least 64")
    if angular_nodes <= span:
        raise DomainError("angular_nodes must exceed the largest frequency difference")

    u, wu = _radial_rule(ann.log_r_inner, ann.log_r_outer, radial_nodes)
    # Radial moments  log ∫ e^{s u} du  for every s = m + n + 2 in the window.
    s = np.arange(2 * lo + 2, 2 * hi + 3)
    with np.errstate(divide="ignore"):
        log_rad = _lse(np.log(wu)[None, :] + s[:, None] * u[None, :], axis=1)
    # Angular sums  (2π/M) Σ_k e^{i d θ_k}  for d = m - n.
    theta = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    d = np.arange(-span, span + 1)
    ang = np.exp(1j * d[:, None] * theta[None, :]).sum(axis=1) * (2.0 * math.pi / angular_nodes)

    idx = np.arange(lo, hi + 1)
    log_r_mn = log_rad[(idx[:, None] + idx[None, :] + 2) - s[0]]
    ang_mn = ang[(idx[:, None] - idx[None, :]) + span]
    log_diag = np.diag(log_r_mn).copy() + math.log(ang[span].real)
    scale = log_r_mn - 0.5 * (np.diag(log_r_mn)[:, None] + np.diag(log_r_mn)[None, :])
    gram = np.exp(scale) * ang_mn / ang[span].real
    gram = 0.5 * (gram + gram.conj().T)
    gram.setflags(write=False)
    log_diag.setflags(write=False)
    return GramSystem(ann, lo, hi, gram, log_diag, radial_nodes, angular_nodes)


def evaluation_rows(g: GramSystem, z: complex, j_max: int) -> np.ndarray:
    """Rows ``d_i(n) = n(n-1)...(n-i+1) z^{n-i}`` for ``i <= j_max`` in scaled coordinates."""
    zc = complex(z) - g.ann.center
    if zc == 0:
        raise DomainError("point coincides with the ring's centre")
    log_rho, arg = math.log(abs(zc)), math.atan2(zc.imag, zc.real)
    n = g.exponents.astype(float)
    rows = np.zeros((j_max + 1, g.size), dtype=complex)
    for i in range(j_max + 1):
        fall = np.ones_like(n)
        for t in range(i):
            fall = fall * (n - t)
        with np.errstate(divide="ignore"):
            log_mag = np.log(np.abs(fall)) + (n - i) * log_rho - 0.5 * g.log_diag
        rows[i] = np.sign(fall) * np.exp(log_mag) * np.exp(1j * (n - i) * arg)
    return rows


def _null_space(E: np.ndarray) -> np.ndarray:
    """Basis of ``{b : E b = 0}`` by Gaussian elimination with complete pivoting."""
    A = E.astype(complex).copy()
    m, n = A.shape
    cols = list(range(n))
    piv_cols = []
    for r in range(m):
        sub = np.abs(A[r:, r:])
        i, k = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, k] == 0.0 or sub[i, k] < 1e-300:
            raise InternalInconsistencyError("evaluation constraints are rank deficient")
        i += r
        k += r
        A[[r, i]] = A[[i, r]]
        A[:, [r, k]] = A[:, [k, r]]
        cols[r], cols[k] = cols[k], cols[r]
        A[r] /= A[r, r]
        for rr in range(m):
            if rr != r:
                A[rr] -= A[rr, r] * A[r]
        piv_cols.append(cols[r])
    # A = [I | F] in permuted order; null vectors are [-F; I].
    F = A[:, m:]
    Q = np.zeros((n, n - m), dtype=complex)
    perm = np.array(cols)
    Q[perm[:m], :] = -F
    Q[perm[m:], np.arange(n - m)] = 1.0
    return Q


@dataclass(frozen=True)
class ExtremalSolution:
    value: float
    coefficients: np.ndarray = field(repr=False)  # unscaled Laurent coefficients a_n
    scaled: np.ndarray = field(repr=False)
    constraint_residual: float


def extremal_solution(g: GramSystem, z: complex, j: int) -> ExtremalSolution:
    """Maximise ``|f^(j)(z)|²`` over unit-norm ``f`` in the window with ``f^(i)(z)=0, i<j``."""
    if j not in (0, 1, 2):
        raise DomainError("order j must be 0, 1 or 2")
    zc = complex(z) - g.ann.center
    log_rho = math.log(abs(zc)) if zc != 0 else -math.inf
    normalize_log(g.ann.log_r_inner, g.ann.log_r_outer, log_rho)
    rows = evaluation_rows(g, z, j)
    c = rows[j]
    if j == 0:
        Q = np.eye(g.size, dtype=complex)
    else:
        Q = _null_space(rows[:j])
    H = Q.conj().T @ g.gram @ Q
    H = 0.5 * (H + H.conj().T)
    Lf = _cholesky_with_ridge(H)
    cq = (c @ Q).conj()
    y = np.linalg.solve(Lf, cq)
    value = float(np.vdot(y, y).real)
    x = np.linalg.solve(Lf.conj().T, y)
    b = Q @ x / math.sqrt(value)
    resid = 0.0
    for i in range(j):
        resid = max(resid, abs(rows[i] @ b) / (np.linalg.norm(rows[i]) * np.linalg.norm(b)))
    a = b * np.exp(-0.5 * g.log_diag)
    return ExtremalSolution(value, a, b, resid)


def extremal_j(g: GramSystem, z: complex, j: int) -> float:
    return extremal_solution(g, z, j).value


def oracle_bergman(
    ann: Annulus,
    z: complex,
    N: int = 40,
    radial_nodes: Optional[int] = None,
    angular_nodes: Optional[int] = None,
    window: str = "balanced",
) -> BergmanEval:
    """Kernel, metric and curvature from the quadrature oracle."""
    check_envelope(ann, N)
    zc = complex(z) - ann.center
    if zc == 0:
        raise DomainError("point is not strictly outside the inner circle (|z-c| <= r)")
    log_rho = math.log(abs(zc))
    alpha, L, log_scale = normalize_log(ann.log_r_inner, ann.log_r_outer, log_rho)
    if window == "balanced":
        win = balanced_window(ann, log_rho, N)
    elif window == "symmetric":
        win = (-N, N)
    else:
        raise DomainError(f"unknown window {window!r}")
    g = build_gram(ann, N, radial_nodes, angular_nodes, window=win)
    vals = [extremal_j(g, z, j) for j in range(3)]
    if not all(v > 0 for v in vals):
        raise InternalInconsistencyError(f"non-positive oracle value {vals}")
    jt = JTriple(*(math.log(v) for v in vals), terms_used=g.size)
    return _assemble(jt, alpha, L, log_scale)
