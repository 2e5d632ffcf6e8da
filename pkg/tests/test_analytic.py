"""Closed-form envelopes and postselected statistics against quadrature.

The oracle here is scipy.integrate.quad over densities written out as plain
formulas, independent of the module code paths it checks.
"""

import math
import warnings

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, quad

from wvdeflect.analytic import (GaussianMeter, PostselectedDensity,
                                UndefinedPostselectionError, evolved_envelope,
                                initial_envelope, mean_x, momentum_envelope,
                                overlap_factor, postselect_probability,
                                postselected_density, reshaped_gaussian_paper,
                                var_x)
from wvdeflect.constants import C_LIGHT
from wvdeflect.medium import EffectiveCoefficients

QUAD_KW = dict(epsabs=1e-14, epsrel=1e-12, limit=400)


def coeffs_for(b1: float, b0: float = 0.0, t: float = 1.0) -> EffectiveCoefficients:
    """Synthetic coefficient set with the requested differential values."""
    return EffectiveCoefficients(b0_plus=b0, b0_minus=0.0, b1_plus=b1, b1_minus=0.0)


def oracle_density(x, theta, beta, a):
    g2 = math.exp(-x * x / (2 * a * a)) / math.sqrt(2 * math.pi * a * a)
    return 0.5 * g2 * (1.0 - math.cos(theta + beta * x))


def oracle_moments(theta, beta, a):
    # quadpack's error estimator is pessimistic for the oscillatory,
    # nearly-cancelling first-moment integrand; accuracy is asserted by the
    # 1e-8 comparisons downstream, so its roundoff warning is noise here.
    lim = 14.0 * a
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        norm = quad(oracle_density, -lim, lim, args=(theta, beta, a), **QUAD_KW)[0]
        mean = quad(lambda x: x * oracle_density(x, theta, beta, a),
                    -lim, lim, **QUAD_KW)[0] / norm
        var = quad(lambda x: (x - mean) ** 2 * oracle_density(x, theta, beta, a),
                   -lim, lim, **QUAD_KW)[0] / norm
    return norm, mean, var


# --------------------------------------------------------------------------
# Envelopes
# --------------------------------------------------------------------------

def test_initial_envelope_peak():
    a = 0.002
    assert initial_envelope(0.0, 0.0, a) == pytest.approx(
        1.0 / math.sqrt(2 * math.pi * a * a), rel=1e-14)


def test_initial_envelope_one_over_e_at_two_widths():
    a = 0.7
    peak = initial_envelope(0.0, 0.0, a)
    assert initial_envelope(2 * a, 0.0, a) == pytest.approx(peak / math.e, rel=1e-13)


def test_initial_envelope_normalized():
    a = 0.31
    # |E|^2 factorizes into two identical 1-D Gaussians
    one_d = quad(lambda u: math.exp(-u * u / (2 * a * a)), -12 * a, 12 * a, **QUAD_KW)[0]
    total = one_d * one_d / (2 * math.pi * a * a)
    assert total == pytest.approx(1.0, rel=1e-12)


def test_initial_envelope_rejects_bad_width():
    with pytest.raises(ValueError):
        initial_envelope(0.0, 0.0, 0.0)


def test_evolved_matches_initial_at_t0():
    a = 0.5
    coeffs = coeffs_for(b1=2.0, b0=3.0)
    x = np.linspace(-2, 2, 7)
    z = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(evolved_envelope(x, z, 0.0, "+", coeffs, a),
                               initial_envelope(x, z, a), rtol=1e-15)


def test_modulus_translation():
    rng = np.random.default_rng(3)
    a, t = 0.8, 1.7
    coeffs = coeffs_for(b1=4.0, b0=-2.0)
    for _ in range(25):
        x, z = rng.uniform(-3, 3), rng.uniform(-1, 1) + C_LIGHT * t
        ev = evolved_envelope(x, z, t, "+", coeffs, a)
        ref = initial_envelope(x, z - C_LIGHT * t, a)
        assert abs(ev) == pytest.approx(abs(ref), rel=1e-13)


def test_evolved_centroid_stays_at_zero():
    # The transverse action is pure phase, so the x-marginal never moves.
    a, t = 0.6, 2.2
    coeffs = coeffs_for(b1=1.5, b0=0.7)
    dens = lambda x: abs(evolved_envelope(x, C_LIGHT * t, t, "+", coeffs, a)) ** 2
    mean = quad(lambda x: x * dens(x), -10 * a, 10 * a, **QUAD_KW)[0]
    assert abs(mean) < 1e-15


def test_gaussian_meter_record():
    coeffs = coeffs_for(b1=2.5, b0=1.25)
    meter = GaussianMeter.evolved(2.0, "+", coeffs, 0.3)
    assert meter.center_z == C_LIGHT * 2.0
    assert meter.phase_const == 2.5
    assert meter.phase_slope == 5.0


def test_momentum_envelope_peak_position():
    a, t = 0.4, 1.3
    coeffs = coeffs_for(b1=6.0)
    k = np.linspace(-30, 30, 4001)
    dens = np.abs(momentum_envelope(k, 0.0, t, "+", coeffs, a)) ** 2
    assert k[np.argmax(dens)] == pytest.approx(-coeffs.b1_plus * t, abs=0.02)
    dens_dark = np.abs(momentum_envelope(k, 0.0, t, "-", coeffs, a)) ** 2
    assert k[np.argmax(dens_dark)] == pytest.approx(0.0, abs=0.02)


def test_parseval_between_domains():
    # Position-space norm is 1; momentum-space norm carries 1/(2 pi) per
    # dimension under F(k) = int E exp(-i k x) dx.
    a, t = 0.9, 0.6
    coeffs = coeffs_for(b1=2.0, b0=1.0)
    # |F|^2 factorizes; momentum_envelope at kz = 0 carries the full
    # prefactor, so multiplying by the bare kz Gaussian integral completes
    # the 2-D norm.
    kx_norm = quad(lambda k: abs(momentum_envelope(k, 0.0, t, "+", coeffs, a)) ** 2,
                   -20 / a, 20 / a, **QUAD_KW)[0]
    kz_profile = quad(lambda k: math.exp(-2 * a * a * k * k), -20 / a, 20 / a, **QUAD_KW)[0]
    full = kx_norm * kz_profile / (2 * math.pi) ** 2
    assert full == pytest.approx(1.0, rel=1e-12)


# --------------------------------------------------------------------------
# Postselected density and its moments
# --------------------------------------------------------------------------

def test_density_orthogonal_is_zero():
    coeffs = coeffs_for(b1=0.0)
    x = np.linspace(-3, 3, 101)
    np.testing.assert_array_equal(postselected_density(x, 1.0, 0.0, coeffs, 1.0),
                                  np.zeros_like(x))


def test_density_antiorthogonal_is_gaussian_marginal():
    a = 0.7
    coeffs = coeffs_for(b1=0.0)
    x = np.linspace(-3, 3, 101)
    marginal = np.exp(-x * x / (2 * a * a)) / math.sqrt(2 * math.pi * a * a)
    np.testing.assert_allclose(postselected_density(x, 1.0, math.pi, coeffs, a),
                               marginal, rtol=1e-12, atol=1e-300)
    assert postselect_probability(1.0, math.pi, coeffs, a) == 1.0


def test_density_nonnegative():
    rng = np.random.default_rng(5)
    x = np.linspace(-8, 8, 2001)
    for _ in range(20):
        dens = PostselectedDensity(theta=rng.uniform(-3, 3),
                                   beta=rng.uniform(-3, 3), a=rng.uniform(0.2, 2))
        assert np.all(dens.evaluate(x) >= 0.0)


def test_probability_matches_quadrature():
    for theta, eps in [(0.08, 0.1), (0.5, 0.7), (2.5, 0.01), (3.0, 1.0)]:
        a = 1.0
        coeffs = coeffs_for(b1=eps / a)
        norm, _, _ = oracle_moments(theta, eps / a, a)
        assert postselect_probability(1.0, theta, coeffs, a) == pytest.approx(
            norm, rel=1e-11)


def test_probability_frozen_example():
    # eps = a*b1*t = 0.1, theta = 0.08; quadrature gave 0.004084931474167352
    coeffs = coeffs_for(b1=0.1)
    assert postselect_probability(1.0, 0.08, coeffs, 1.0) == pytest.approx(
        0.004084931474167352, rel=1e-11)


def test_completeness():
    rng = np.random.default_rng(9)
    for _ in range(50):
        coeffs = coeffs_for(b1=rng.uniform(-2, 2), b0=rng.uniform(-2, 2))
        t, alpha, a = rng.uniform(0.1, 2), rng.uniform(-3, 3), rng.uniform(0.3, 1.5)
        p_v = postselect_probability(t, alpha, coeffs, a, "V")
        p_h = postselect_probability(t, alpha, coeffs, a, "H")
        assert abs(p_v + p_h - 1.0) < 1e-12


def test_probability_rejects_unknown_state():
    with pytest.raises(ValueError):
        postselect_probability(1.0, 0.1, coeffs_for(b1=1.0), 1.0, state="D")


def test_mean_zero_without_gradient():
    assert mean_x(1.0, 0.3, coeffs_for(b1=0.0), 1.0) == 0.0


def test_mean_frozen_example():
    # a = 1, b1 t = 0.001, theta = 0.08: quadrature oracle gave
    # 0.024982759604500776 (first-order read: 0.0249866...).
    coeffs = coeffs_for(b1=0.001)
    assert mean_x(1.0, 0.08, coeffs, 1.0) == pytest.approx(
        0.024982759604500776, rel=1e-10)


def test_mean_zero_at_theta_zero_with_coupling():
    assert mean_x(1.0, 0.0, coeffs_for(b1=0.5), 1.0) == 0.0


def test_mean_undefined_when_fully_orthogonal():
    with pytest.raises(UndefinedPostselectionError):
        mean_x(1.0, 0.0, coeffs_for(b1=0.0), 1.0)


def test_var_collapses_without_gradient():
    a = 0.37
    assert var_x(1.0, 0.9, coeffs_for(b1=0.0), a) == a * a


def test_var_frozen_example():
    coeffs = coeffs_for(b1=0.001)
    assert var_x(1.0, 0.08, coeffs, 1.0) == pytest.approx(
        0.9996874797262548, rel=1e-10)


def test_var_requires_zero_b0():
    with pytest.raises(ValueError, match="b0"):
        var_x(1.0, 0.5, coeffs_for(b1=1.0, b0=0.2), 1.0)


def test_var_undefined_when_fully_orthogonal():
    with pytest.raises(UndefinedPostselectionError):
        var_x(1.0, 0.0, coeffs_for(b1=0.0), 1.0)


def test_var_stable_form_equals_textbook_form():
    # Where the printed expression is well-conditioned the rearranged
    # evaluation must agree with it to rounding.
    rng = np.random.default_rng(13)
    for _ in range(50):
        a = rng.uniform(0.3, 2.0)
        alpha = rng.uniform(0.5, 3.0)
        eps = rng.uniform(0.05, 1.0)
        coeffs = coeffs_for(b1=eps / a)
        f = math.exp(-0.5 * eps * eps)
        e2 = eps * eps
        textbook = a * a * (1 + (e2 - 2) * f * math.cos(alpha)
                            + (math.cos(alpha) ** 2 - e2) * f * f) \
            / (1 - f * math.cos(alpha)) ** 2
        assert var_x(1.0, alpha, coeffs, a) == pytest.approx(textbook, rel=1e-11)


def test_moments_match_quadrature_100_draws():
    # eps log-uniform in [1e-4, 1], theta uniform in [0.01, 3].
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        eps = 10.0 ** rng.uniform(-4, 0)
        theta = rng.uniform(0.01, 3.0)
        a = 1.0
        coeffs = coeffs_for(b1=eps / a)
        norm_o, mean_o, var_o = oracle_moments(theta, eps / a, a)
        gap_mean = abs(mean_x(1.0, theta, coeffs, a) - mean_o) / abs(mean_o)
        gap_var = abs(var_x(1.0, theta, coeffs, a) - var_o) / abs(var_o)
        gap_norm = abs(postselect_probability(1.0, theta, coeffs, a) - norm_o) / norm_o
        worst = max(worst, gap_mean, gap_var, gap_norm)
    assert worst < 1e-8


def test_small_coupling_expansion_slope():
    # mean_x / (a^2 b1 t cot(theta/2)) -> 1 with error ~ eps^2.
    theta, a = 0.8, 1.0
    eps_values = np.logspace(-4, -2, 9)
    errors = []
    for eps in eps_values:
        coeffs = coeffs_for(b1=eps / a)
        first_order = a * a * coeffs.b1 * 1.0 / math.tan(theta / 2)
        errors.append(abs(mean_x(1.0, theta, coeffs, a) / first_order - 1.0))
    slope = np.polyfit(np.log(eps_values), np.log(errors), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("eps", [0.03, 0.1, 0.3])
def test_centroid_argmax_matches_derivative_condition(eps):
    # d mean/d theta = 0 at cos(theta*) = f_t; grid search must agree.
    a = 1.0
    coeffs = coeffs_for(b1=eps / a)
    thetas = np.arange(1e-5, math.pi, 1e-5)
    f = overlap_factor(1.0, coeffs, a)
    means = np.abs(np.sin(thetas) * eps * f / (1.0 - f * np.cos(thetas)))
    theta_star = thetas[np.argmax(means)]
    assert abs(theta_star - math.acos(f)) <= 1e-5


# --------------------------------------------------------------------------
# Reshaped-Gaussian estimate
# --------------------------------------------------------------------------

def test_reshaped_reduces_to_input_profile():
    a = 0.8
    x = np.linspace(-3, 3, 101)
    np.testing.assert_allclose(reshaped_gaussian_paper(x, 0.0, a),
                               np.real(initial_envelope(x, 0.0, a)), rtol=1e-14)


def test_reshaped_literal_argmax_at_half_shift():
    a, x_wv = 0.5, 1.8
    x = np.linspace(-5, 5, 100001)
    values = reshaped_gaussian_paper(x, x_wv, a)
    assert x[np.argmax(values)] == pytest.approx(x_wv / 2, abs=2e-4)


def test_reshaped_literal_norm_deficit():
    # Integral of the squared literal form is (2 pi a^2)^(-1/2) e^{-3 xwv^2/(8 a^2)},
    # not 1; the artifact records the deficit rather than renormalizing.
    a, x_wv = 0.6, 1.1
    integral = quad(lambda x: reshaped_gaussian_paper(x, x_wv, a) ** 2,
                    -12 * a + x_wv / 2, 12 * a + x_wv / 2, **QUAD_KW)[0]
    expected = math.exp(-3 * x_wv ** 2 / (8 * a * a)) / math.sqrt(2 * math.pi * a * a)
    assert integral == pytest.approx(expected, rel=1e-11)
    assert abs(integral - 1.0) > 0.5  # markedly unnormalized here


def test_reshaped_shifted_mode_is_normalized_and_centered():
    a, x_wv = 0.45, 2.3
    norm = quad(lambda x: reshaped_gaussian_paper(x, x_wv, a, mode="shifted") ** 2,
                x_wv - 12 * a, x_wv + 12 * a, **QUAD_KW)[0]
    assert norm == pytest.approx(1.0, rel=1e-11)
    x = np.linspace(x_wv - 3 * a, x_wv + 3 * a, 20001)
    vals = reshaped_gaussian_paper(x, x_wv, a, mode="shifted")
    assert x[np.argmax(vals)] == pytest.approx(x_wv, abs=1e-3)


def test_reshaped_rejects_unknown_mode():
    with pytest.raises(ValueError):
        reshaped_gaussian_paper(0.0, 1.0, 1.0, mode="fixed")
