"""The eleven acceptance criteria, each at its stated tolerance and time budget.

Every test records ``(ok, summary)`` in ``helpers.ACCEPTANCE`` before asserting;
``conftest.py`` prints one line per criterion at the end of the session.
"""

import math
import time

import numpy as np

from annulus_bergman import Annulus, asymptotics as asy, bergman_eval, bergman_eval_log, canonical_eval
from annulus_bergman import expansion as ex
from annulus_bergman import zalcman as Z
from annulus_bergman.core import expanded_j, naive_j, phi_psi_table
from annulus_bergman.geometry import inclusion_monotonicity_check
from annulus_bergman.oracle import oracle_bergman

from helpers import ACCEPTANCE, log_rel, rel


def record(key, ok, text):
    ACCEPTANCE[key] = (bool(ok), text)
    assert ok, text


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_disk_limit():
    worst = 0.0
    with Clock() as c:
        ann = Annulus.from_radii(1e-10, 1.0)
        for x in (0.3, 0.6, 0.9):
            e = bergman_eval(ann, x)
            s = 1 - x * x
            worst = max(
                worst,
                rel(e.kernel, 1 / (math.pi * s * s)),
                rel(e.metric_sq, 2 / (s * s)),
                abs(e.curvature + 1),
            )
    ok = worst <= 1e-5 and c.elapsed < 1.0
    record(1, ok, f"disk limit: worst rel dev {worst:.3g} (tol 1e-5), {c.elapsed:.2f}s")


def test_criterion_02_inversion_symmetry():
    worst = 0.0
    with Clock() as c:
        for q in (1e-2, 1e-4, 1e-6):
            L = -math.log(q)
            for a in (0.2, 0.35, 0.5):
                r1 = bergman_eval_log(-L, 0.0, -a * L).curvature
                r2 = bergman_eval_log(-L, 0.0, -(1 - a) * L).curvature
                worst = max(worst, abs(r1 - r2) / abs(r1))
    ok = worst <= 1e-9 and c.elapsed < 1.0
    record(2, ok, f"inversion symmetry: worst {worst:.3g} (tol 1e-9), {c.elapsed:.2f}s")


def test_criterion_03_oracle_equivalence():
    worst_j = worst_c = 0.0
    with Clock() as c:
        for q in (0.05, 0.1, 0.3):
            ann = Annulus.from_radii(q, 1.0)
            for a in (0.25, 0.5, 0.75):
                z = q**a
                m = bergman_eval(ann, z)
                o = oracle_bergman(ann, z, 40)
                for x, y in ((m.j.log_j0, o.j.log_j0), (m.j.log_j1, o.j.log_j1), (m.j.log_j2, o.j.log_j2)):
                    worst_j = max(worst_j, log_rel(y, x))
                worst_c = max(worst_c, rel(o.curvature, m.curvature))
    ok = worst_j <= 1e-6 and worst_c <= 1e-5 and c.elapsed < 30.0
    record(3, ok, f"oracle equivalence: J {worst_j:.3g} (1e-6), curvature {worst_c:.3g} (1e-5), {c.elapsed:.2f}s")


def test_criterion_04_limit_signs():
    with Clock() as c:
        curv = [canonical_eval(0.5, k * math.log(10)).curvature for k in (4, 5, 6)]
        gap = 2 - bergman_eval_log(-400.0, 0.0, -0.25 * 400.0).curvature
    ok = curv[0] < -100 and curv[0] > curv[1] > curv[2] and gap <= 0.1 and c.elapsed < 1.0
    text = ", ".join(f"{v:.1f}" for v in curv)
    record(4, ok, f"limit signs: R(1/2) = {text}; 2-R(1/4, L=400) = {gap:.3g}, {c.elapsed:.2f}s")


def test_criterion_05_rate_constants():
    parts, ok = [], True
    with Clock() as c:
        for a, target in ((0.25, 4.0), (0.4, 2.0), (0.5, 0.25)):
            s = asy.rate_constant_study(a, [40, 60, 80])
            good = abs(s.last - target) <= 0.2 * target and s.spread < 0.2
            ok &= good
            parts.append(f"{s.last:.6f} vs {target}")
    ok &= c.elapsed < 5.0
    record(5, ok, f"rate constants: {', '.join(parts)} (20%), {c.elapsed:.2f}s")


def test_criterion_06_tilde_checks():
    failures = []
    with Clock() as c:
        for a in (0.25, 0.5, 0.75):
            for i in range(3):
                rep = asy.tilde_verify(
                    asy.measured_display(i, a), asy.predicted_display(i, a, asy.SYMMETRIC_A_MAG), 0.02, [10, 20, 40, 80]
                )
                if not rep.passed:
                    failures.append((a, i))
    ok = not failures and c.elapsed < 5.0
    record(6, ok, f"tilde checks: 9 displays, failures {failures or 'none'} (A_mag=32), {c.elapsed:.2f}s")


def test_criterion_07_a_constant():
    with Clock() as c:
        fit = asy.fit_A([0.8], [30, 60, 90])
        alphas, Ls = [0.8] * 3, [30.0, 60.0, 90.0]
        synth = asy.fit_A_from_data(alphas, Ls, asy.synthetic_values(alphas, Ls, 150.0)).estimate
    synth_ok = abs(synth - 150) <= 1.5
    ok = fit.estimate > 100 and synth_ok and c.elapsed < 5.0
    record(
        7,
        ok,
        f"A constant: fitted {fit.estimate:.6g} (need > 100), synthetic 150 -> {synth:.6g} "
        f"({'ok' if synth_ok else 'off'}), {c.elapsed:.2f}s",
    )


def test_criterion_08_ratio_inequality():
    parts, ok = [], True
    with Clock() as c:
        for r, s, a, eps in ((1e-6, 0.25, 0.5, 0.05), (1e-8, 0.4, 0.3, 0.05)):
            rep = Z.ratio_bound_check(-math.log(r), s, a, eps)
            ok &= rep.passed and rep.at_least_one
            parts.append(f"r={r:g}: [{', '.join(f'{x:.4g}' for x in rep.ratios)}] <= {rep.bound:.4g}?")
    ok &= c.elapsed < 1.0
    record(8, ok, f"ratio inequality: {'; '.join(parts)}, {c.elapsed:.2f}s")


def test_criterion_09_cancellation_integrity():
    with Clock() as c:
        num, den = ex.u_coefficients(ex.NUMERATOR), ex.u_coefficients(ex.DENOMINATOR)
        symbolic_ok = not num.get(2) and not num.get(3) and not den.get(2)
        worst = 0.0
        for a in (0.3, 0.5, 0.7):
            for L in np.linspace(1.0, 4.0, 13):
                t = phi_psi_table(a, float(L))
                worst = max(worst, rel(naive_j(t)[2], expanded_j(t)[2]))
    ok = symbolic_ok and worst <= 1e-8 and c.elapsed < 1.0
    record(9, ok, f"cancellation: symbolic zeros {symbolic_ok}, naive vs expanded {worst:.3g} (1e-8), {c.elapsed:.2f}s")


def test_criterion_10_zalcman_construction():
    with Clock() as c:
        dom = Z.construct(0.5, 2, 0.1)
        valid = Z.validate_geometry(dom).ok
        certs = all(
            st.x_cert.lo > 2 - 1 / k and st.y_cert.hi < -k for k, st in enumerate(dom.stages, start=1)
        )
        inside = True
        for st in dom.stages:
            for off, cert in ((st.log_x_offset, st.x_cert), (st.log_y_offset, st.y_cert)):
                det = Z.sandwich_bounds_log(st.hole.log_radius, st.log_clearance, off)
                inside &= cert.lo <= det.small_curvature <= cert.hi and cert.lo <= det.large_curvature <= cert.hi
    ok = valid and certs and inside and c.elapsed < 60.0
    ns = [st.hole.n for st in dom.stages]
    record(10, ok, f"zalcman: n={ns}, valid {valid}, certificates {certs}, bounds inside {inside}, {c.elapsed:.2f}s")


def test_criterion_11_monotonicity():
    rng = np.random.default_rng(20240611)
    failures = 0
    with Clock() as c:
        for _ in range(20):
            q2, q1 = sorted(10.0 ** rng.uniform(-8, -0.3, size=2))
            rho = q1 ** rng.uniform(0.05, 0.95)
            z = rho * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))
            failures += not inclusion_monotonicity_check(q1, q2, z).holds
        ann = Annulus.from_radii(0.2, 1.0)
        prev, oracle_ok = None, True
        for N in (5, 10, 20, 40):
            o = oracle_bergman(ann, 0.45, N)
            cur = (o.j.log_j0, o.j.log_j1, o.j.log_j2)
            if prev is not None:
                oracle_ok &= all(b >= a - 1e-12 for a, b in zip(prev, cur))
            prev = cur
    ok = failures == 0 and oracle_ok and c.elapsed < 5.0
    record(11, ok, f"monotonicity: {failures}/20 inclusion failures, oracle N-monotone {oracle_ok}, {c.elapsed:.2f}s")
