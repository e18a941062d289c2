import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from annulus_bergman import asymptotics as asy
from annulus_bergman import canonical_eval, reference
from annulus_bergman.asymptotics import Regime
from annulus_bergman.errors import DomainError


# -- rate table ------------------------------------------------------------------------


def test_regime_log_band():
    assert asy.regime(0.25).regime is Regime.LOG
    assert asy.regime(1 / 3).regime is Regime.LOG
    assert asy.regime(2 / 3).regime is Regime.LOG
    assert asy.regime(0.9).exponent == 0.0


def test_regime_power_bands():
    law = asy.regime(0.4)
    assert law.regime is Regime.LEFT_POWER
    assert law.exponent == pytest.approx(0.4)
    assert asy.regime(0.6).regime is Regime.RIGHT_POWER
    assert asy.regime(0.6).exponent == pytest.approx(0.4)


def test_regime_continuous_at_half():
    assert asy.regime(0.5).exponent == pytest.approx(1.0)
    assert asy.regime(0.5 + 1e-12).exponent == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.2, math.nan])
def test_regime_domain(bad):
    with pytest.raises(DomainError):
        asy.regime(bad)


def test_rate_law_invariants():
    with pytest.raises(DomainError):
        asy.RateLaw(Regime.LOG, 0.5)
    with pytest.raises(DomainError):
        asy.RateLaw(Regime.LEFT_POWER, 0.0)
    with pytest.raises(DomainError):
        asy.RateLaw(Regime.LEFT_POWER, 1.5)
    law = asy.RateLaw(Regime.LEFT_POWER, 1.0)
    assert law.rate(10.0) == pytest.approx(math.exp(10) / 10)
    assert law.description == "1/(r^1*(-log r))"


# -- predictions ------------------------------------------------------------------------


def test_prediction_kernel_term():
    p = asy.predicted_leading(1e-3, 0.5)
    assert p.j0_lead == pytest.approx(1 / (3 * math.log(10)), rel=1e-14)
    assert p.j0_lead == pytest.approx(0.14476, abs=1e-5)


def test_prediction_metric_term_symmetric():
    assert asy.predicted_leading(0.05, 0.3).j1_lead == pytest.approx(
        asy.predicted_leading(0.05, 0.7).j1_lead, rel=1e-14
    )


def test_prediction_template_arithmetic():
    r = 0.1
    p = asy.predicted_leading(r, 0.5, 150.0)
    expected = 16 * r**2 / (1 - r**2) ** 2 + (150 + 32) * r**3 / ((1 - r**2) * (1 - r**4))
    assert p.a_of_r == pytest.approx(expected, rel=1e-14)
    assert p.a_of_r == pytest.approx(0.34710, abs=5e-5)
    assert p.j2_lead == pytest.approx(p.a_of_r / p.j1_lead)
    assert p.coefficients == {"c_r2": 16.0, "c_r6a": 32.0, "c_r61ma": 150.0}
    assert p.A_source == "assumed"


def test_prediction_domain():
    with pytest.raises(DomainError):
        asy.predicted_leading(1.5, 0.5)
    with pytest.raises(DomainError):
        asy.predicted_leading(0.1, 0.5, A_mag=-1.0)


# -- rate constants ---------------------------------------------------------------------


@pytest.mark.parametrize("alpha,target", [(0.25, 4.0), (0.4, 2.0), (0.5, 0.25)])
def test_rate_constants(alpha, target):
    s = asy.rate_constant_study(alpha, [20, 40, 80])
    assert s.cauchy
    assert s.last == pytest.approx(target, rel=1e-6)


@pytest.mark.parametrize("alpha", [0.2, 0.4, 0.45])
def test_rate_study_symmetric(alpha):
    a = asy.rate_constant_study(alpha, [10, 20, 40])
    b = asy.rate_constant_study(1 - alpha, [10, 20, 40])
    for x, y in zip(a.products, b.products):
        assert x == pytest.approx(y, rel=1e-10)


def test_rate_study_needs_increasing_grid():
    with pytest.raises(DomainError):
        asy.rate_constant_study(0.3, [20, 10, 40])


@given(st.floats(0.05, 0.95), st.floats(10.0, 200.0))
def test_rate_products_positive_and_symmetric(alpha, L):
    p = asy.defect_times_inv_rate(alpha, L)
    assert p > 0
    assert p == pytest.approx(asy.defect_times_inv_rate(1 - alpha, L), rel=1e-9)


@pytest.mark.parametrize("alpha,target", [(0.1, 4.0), (0.2, 4.0), (0.45, 2.0), (0.8, 4.0)])
def test_rate_product_limits(alpha, target):
    assert asy.defect_times_inv_rate(alpha, 200.0) == pytest.approx(target, rel=1e-3)


def test_divergent_regime_curvature():
    curv = [canonical_eval(0.5, L).curvature for L in (10, 20, 40)]
    assert curv[0] < -100
    assert curv[0] > curv[1] > curv[2]


@pytest.mark.parametrize("alpha", [0.2, 0.8])
def test_log_regime_defect_bracket(alpha):
    assert 2 <= canonical_eval(alpha, 60).defect * 60 <= 8


# -- tilde checks -------------------------------------------------------------------------


def test_tilde_exact_match_passes():
    f = lambda L: 1 / L
    rep = asy.tilde_verify(f, f, 0.02, [10, 20, 40, 80])
    assert rep.passed and all(e == 0 for e in rep.errors)


def test_tilde_detects_slow_deviation():
    eps = 0.02
    pred = lambda L: 1 / L
    meas = lambda L: (1 / mpmath.mpf(L)) * (1 + mpmath.exp(-eps / 2 * L))
    rep = asy.tilde_verify(meas, pred, eps, [10, 20, 40, 80])
    assert not rep.passed
    assert rep.errors[-1] > rep.errors[0]


def test_tilde_zero_prediction_rejected():
    with pytest.raises(DomainError):
        asy.tilde_verify(lambda L: 1.0, lambda L: 0.0, 0.02, [10, 20, 40])


def test_tilde_kernel_display_at_half():
    rep = asy.tilde_verify(asy.measured_display(0, 0.5), asy.predicted_display(0, 0.5), 0.02, [10, 20, 40, 80])
    assert rep.passed


def test_measured_display_matches_double_precision_path():
    for i in range(3):
        m = float(asy.measured_display(i, 0.3)(12.0))
        e = canonical_eval(0.3, 12.0)
        lj = (e.j.log_j0, e.j.log_j1, e.j.log_j2)[i]
        # canonical_eval is P(r,1) at r^alpha; undo the r^{-2(j+1)alpha} factor and the 2*pi.
        val = math.exp(lj - 2 * (i + 1) * 0.3 * 12.0 + math.log(2 * math.pi))
        assert val == pytest.approx(m, rel=1e-12)


def test_default_A_breaks_the_third_display_where_it_dominates():
    rep = asy.tilde_verify(
        asy.measured_display(2, 0.75), asy.predicted_display(2, 0.75, asy.DEFAULT_A_MAG), 0.02, [10, 20, 40, 80]
    )
    assert not rep.passed


# -- fitting -------------------------------------------------------------------------------


def test_fit_recovers_synthetic_coefficient():
    alphas, Ls = [0.8] * 3, [30.0, 60.0, 90.0]
    rep = asy.fit_A_from_data(alphas, Ls, asy.synthetic_values(alphas, Ls, 150.0))
    assert rep.estimate == pytest.approx(150.0, rel=1e-2)
    assert rep.residual < 1e-12
    assert rep.exceeds_bound


def test_fit_stable_across_alpha_window():
    a = asy.fit_A([0.75], [30, 60, 90]).estimate
    b = asy.fit_A([0.85], [30, 60, 90]).estimate
    assert a == pytest.approx(b, rel=0.1)


def test_free_coefficient_matches_symmetric_value():
    rep = asy.fit_A([0.8], [30, 60, 90])
    assert rep.estimate == pytest.approx(asy.SYMMETRIC_A_MAG, rel=1e-4)
    assert rep.dominance > 10


def test_free_coefficient_converges_in_extended_precision():
    c1, _ = reference.numerator_lead(0.8, 150.0, dps=80)
    with mpmath.workdps(80):
        t_r2, t_free, t_r6a = asy._template_terms(mpmath.mpf(150), mpmath.mpf("0.8"), mpmath)
        A = (c1 - t_r2 - t_r6a) / t_free
    assert float(A) == pytest.approx(32.0, rel=1e-12)


def test_fit_rejects_alpha_outside_window():
    with pytest.raises(asy.FitError):
        asy.fit_A([0.6], [30, 60])


def test_fit_reports_ill_conditioning():
    alphas, Ls = [0.7] * 3, [2.0, 3.0, 4.0]
    with pytest.raises(asy.FitError, match="dominates"):
        asy.fit_A_from_data(alphas, Ls, asy.synthetic_values(alphas, Ls, 1.0))
