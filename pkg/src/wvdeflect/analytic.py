"""Closed-form envelope evolution and postselected meter statistics.

The transverse (x) and longitudinal (z) dependences of the evolved
envelope factorize, so every postselection statistic reduces to the 1-D
transverse marginal.  With theta = alpha + b0*t (total differential phase)
and beta = b1*t (differential phase gradient), projecting the evolved
two-polarization state onto |V> reshapes the meter density to

    rho(x) = (1/2) (2 pi a^2)^(-1/2) exp(-x^2/(2 a^2)) (1 - cos(theta + beta x)),

an interference pattern whose normalization, centroid and width have the
closed forms implemented below.  Expressions are evaluated in
cancellation-free rearrangements (1 - cos u = 2 sin^2(u/2),
1 - f = -expm1(-eps^2/2)) so they track quadrature oracles at relative
1e-12 even deep in the near-orthogonal regime.

Fourier convention: F(k) = integral E(x) exp(-i k x) dx, so position and
momentum norms satisfy ||E||^2 = ||F||^2 / (2 pi) per transverse dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT
from .medium import EffectiveCoefficients, _check_pol


class UndefinedPostselectionError(ValueError):
    """Postselection probability is exactly zero: meter statistics undefined."""


def overlap_factor(t: float, coeffs: EffectiveCoefficients, a: float) -> float:
    """Gaussian overlap f_t = exp(-a^2 b1^2 t^2 / 2) of the two momentum-displaced
    polarization wavepackets."""
    eps = a * coeffs.b1 * t
    return math.exp(-0.5 * eps * eps)


def initial_envelope(x, z, a: float):
    """Normalized 2-D Gaussian amplitude (2 pi a^2)^(-1/2) exp(-(z^2+x^2)/(4 a^2))."""
    if a <= 0.0:
        raise ValueError("beam width a must be positive")
    norm = 1.0 / math.sqrt(2.0 * math.pi * a * a)
    return norm * np.exp(-(np.asarray(z) ** 2 + np.asarray(x) ** 2) / (4.0 * a * a))


@dataclass(frozen=True)
class GaussianMeter:
    """Parameter record of an evolved Gaussian meter wavepacket.

    The medium acts on branch j purely through phases: a constant
    phase_const = b0_j * t and a linear phase ramp phase_slope = b1_j * t,
    on top of the free displacement center_z = c*t.  The modulus stays a
    normalized 2-D Gaussian.
    """

    a: float
    center_x: float
    center_z: float
    phase_const: float  # rad
    phase_slope: float  # rad/m, coefficient of x in the accumulated phase

    @classmethod
    def evolved(cls, t: float, pol: str, coeffs: EffectiveCoefficients,
                a: float) -> "GaussianMeter":
        _check_pol(pol)
        return cls(a=a, center_x=0.0, center_z=C_LIGHT * t,
                   phase_const=coeffs.b0_for(pol) * t,
                   phase_slope=coeffs.b1_for(pol) * t)

    def amplitude(self, x, z):
        if self.a <= 0.0:
            raise ValueError("beam width a must be positive")
        a2 = self.a * self.a
        norm = 1.0 / math.sqrt(2.0 * math.pi * a2)
        xs = np.asarray(x) - self.center_x
        zs = np.asarray(z) - self.center_z
        phase = self.phase_const + self.phase_slope * np.asarray(x)
        return norm * np.exp(-(zs * zs + xs * xs) / (4.0 * a2) - 1j * phase)


def evolved_envelope(x, z, t: float, pol: str, coeffs: EffectiveCoefficients,
                     a: float):
    """Envelope of branch j after time t in the medium: the initial Gaussian
    displaced by c*t in z and dressed with phase exp(-i t (b0_j + b1_j x))."""
    return GaussianMeter.evolved(t, pol, coeffs, a).amplitude(x, z)


def momentum_envelope(kx, kz, t: float, pol: str, coeffs: EffectiveCoefficients,
                      a: float):
    """Fourier transform of the evolved envelope.

    The transverse spectrum is a Gaussian displaced to kx = -b1_j t: the
    optical Stern-Gerlach momentum kick.  The longitudinal spectrum is
    unchanged up to the free-flight phase.
    """
    _check_pol(pol)
    if a <= 0.0:
        raise ValueError("beam width a must be positive")
    a2 = a * a
    b0 = coeffs.b0_for(pol)
    b1 = coeffs.b1_for(pol)
    kxs = np.asarray(kx)
    kzs = np.asarray(kz)
    pref = 2.0 * math.sqrt(2.0 * a2 * math.pi)
    shift = kxs + b1 * t
    return pref * np.exp(-1j * b0 * t - a2 * kzs * kzs - 1j * C_LIGHT * kzs * t
                         - a2 * shift * shift)


# --------------------------------------------------------------------------
# Postselected transverse statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PostselectedDensity:
    """Unnormalized transverse density after projecting onto |V>.

    Fully parameterized by the total differential phase theta (rad), the
    phase gradient beta (1/m) and the beam width a; the prefactor keeps
    the x-marginal Gaussian unit-normalized before the interference factor.
    """

    theta: float
    beta: float
    a: float

    @classmethod
    def from_params(cls, t: float, alpha: float, coeffs: EffectiveCoefficients,
                    a: float) -> "PostselectedDensity":
        if a <= 0.0:
            raise ValueError("beam width a must be positive")
        return cls(theta=alpha + coeffs.b0 * t, beta=coeffs.b1 * t, a=a)

    @property
    def coupling(self) -> float:
        """Dimensionless meter--system coupling eps = a * beta."""
        return self.a * self.beta

    @property
    def overlap(self) -> float:
        """Gaussian wavepacket overlap f = exp(-eps^2/2)."""
        eps = self.coupling
        return math.exp(-0.5 * eps * eps)

    def _denominator(self) -> float:
        """1 - f cos(theta), evaluated without cancellation.

        Uses 1 - f cos(theta) = 2 sin^2(theta/2) + cos(theta) (1 - f) with
        1 - f = -expm1(-eps^2/2); exact zero only for theta = 0 and eps = 0.
        """
        eps = self.coupling
        one_minus_f = -math.expm1(-0.5 * eps * eps)
        s = math.sin(0.5 * self.theta)
        return 2.0 * s * s + math.cos(self.theta) * one_minus_f

    def evaluate(self, x):
        """Density values; nonnegative everywhere by construction."""
        a2 = self.a * self.a
        norm = 1.0 / math.sqrt(2.0 * math.pi * a2)
        xs = np.asarray(x)
        fringe = np.sin(0.5 * (self.theta + self.beta * xs)) ** 2  # (1-cos)/2
        return norm * np.exp(-xs * xs / (2.0 * a2)) * fringe

    @property
    def probability(self) -> float:
        """Selection probability: integral of the density over x."""
        return 0.5 * self._denominator()

    @property
    def mean(self) -> float:
        """Centroid of the normalized density."""
        den = self._denominator()
        if den <= 0.0:
            raise UndefinedPostselectionError(
                "postselection orthogonal to the evolved state (theta = 0, beta = 0)")
        return math.sin(self.theta) * self.a * self.a * self.beta * self.overlap / den


def postselected_density(x, t: float, alpha: float, coeffs: EffectiveCoefficients,
                         a: float):
    """Unnormalized |V>-postselected transverse density at time t."""
    return PostselectedDensity.from_params(t, alpha, coeffs, a).evaluate(x)


def postselect_probability(t: float, alpha: float, coeffs: EffectiveCoefficients,
                           a: float, state: str = "V") -> float:
    """Probability of postselecting |V> (default) or |H>; the two sum to 1."""
    dens = PostselectedDensity.from_params(t, alpha, coeffs, a)
    if state == "V":
        return dens.probability
    if state == "H":
        # 1 + f cos(theta) = (1 - f) + 2 f cos^2(theta/2), cancellation-free
        eps = dens.coupling
        one_minus_f = -math.expm1(-0.5 * eps * eps)
        c = math.cos(0.5 * dens.theta)
        return 0.5 * (one_minus_f + 2.0 * dens.overlap * c * c)
    raise ValueError(f"state must be 'V' or 'H', got {state!r}")


def mean_x(t: float, alpha: float, coeffs: EffectiveCoefficients, a: float) -> float:
    """Exact postselected centroid
    sin(b0 t + alpha) a^2 b1 t f_t / (1 - f_t cos(b0 t + alpha))."""
    return PostselectedDensity.from_params(t, alpha, coeffs, a).mean


def var_x(t: float, alpha: float, coeffs: EffectiveCoefficients, a: float) -> float:
    """Exact postselected transverse variance, b0 = 0 branch.

    Algebraically equal to
    a^2 [1 + (a^2 b1^2 t^2 - 2) f cos(alpha) + (cos^2(alpha) - a^2 b1^2 t^2) f^2]
        / (1 - f cos(alpha))^2,
    evaluated here as a^2 (1 + eps^2 f cos(alpha)/D - (eps f sin(alpha)/D)^2)
    with D = 1 - f cos(alpha), which loses no precision for small alpha, eps.
    The general-b0 variance is only available through the numeric oracle.
    """
    if coeffs.b0 != 0.0:
        raise ValueError("closed-form variance requires b0 = 0; use the grid oracle")
    dens = PostselectedDensity.from_params(t, alpha, coeffs, a)
    den = dens._denominator()
    if den <= 0.0:
        raise UndefinedPostselectionError(
            "postselection orthogonal to the evolved state (theta = 0, beta = 0)")
    eps = dens.coupling
    f = dens.overlap
    mean_over_a = eps * f * math.sin(dens.theta) / den
    second_over_a2 = 1.0 + eps * eps * f * math.cos(dens.theta) / den
    return a * a * (second_over_a2 - mean_over_a * mean_over_a)


def reshaped_gaussian_paper(x, x_wv: float, a: float, mode: str = "literal"):
    """Weak-measurement estimate of the reshaped transverse wavepacket.

    mode="literal" evaluates
        (2 pi a^2)^(-1/2) exp(-(x^2 - x x_wv + x_wv^2) / (4 a^2))
    exactly as printed in the first-order treatment; completing the square
    shows it peaks at x_wv/2, and its squared modulus integrates to
    (2 pi a^2)^(-1/2) exp(-3 x_wv^2 / (8 a^2)) rather than 1.  Callers
    record that deficit instead of repairing it.

    mode="shifted" evaluates the unit-normalized 1-D interpretation
        (2 pi a^2)^(-1/4) exp(-(x - x_wv)^2 / (4 a^2)),
    a Gaussian genuinely centered at x_wv, for comparison.
    """
    if a <= 0.0:
        raise ValueError("beam width a must be positive")
    a2 = a * a
    xs = np.asarray(x)
    if mode == "literal":
        norm = 1.0 / math.sqrt(2.0 * math.pi * a2)
        return norm * np.exp(-(xs * xs - xs * x_wv + x_wv * x_wv) / (4.0 * a2))
    if mode == "shifted":
        norm = (2.0 * math.pi * a2) ** -0.25
        return norm * np.exp(-((xs - x_wv) ** 2) / (4.0 * a2))
    raise ValueError(f"mode must be 'literal' or 'shifted', got {mode!r}")
