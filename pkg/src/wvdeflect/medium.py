"""Linear optical response of the driven tripod medium.

Eliminating the excited state adiabatically under strong driving leaves,
for each circular probe polarization, a scalar envelope Hamiltonian

    H_j = c p_z + b0_j + b1_j x,

with b0_j = kappa_j * Delta_j(0) and b1_j = kappa_j * dDelta_j/dx, where
Delta_j(x) is the (affine-in-x) Raman detuning of branch j and
kappa_j = N |g_j|^2 / (2 |Omega|^2).  Detunings are kept as exact affine
functions of x here; discretization is entirely the caller's business.

Note b0_j as computed from (omega_j + nu - omega_s - nu_c) is identical to
kappa_j * Delta_j(0): the excited-state energy omega_e and moment mu_e
cancel in delta_j - delta_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import EPSILON_0, HBAR
from .physparams import PhysicalSystem


@dataclass(frozen=True)
class AffineFrequency:
    """A frequency with an affine transverse profile: value(x) = const + slope*x."""

    const: float  # rad/s
    slope: float  # rad/(s m)

    def at(self, x: float) -> float:
        return self.const + self.slope * x


@dataclass(frozen=True)
class Detunings:
    """Single-photon detunings of the three couplings and the two Raman
    (two-photon) detunings, all affine in the transverse coordinate."""

    delta_plus: AffineFrequency
    delta_minus: AffineFrequency
    delta_c: AffineFrequency
    raman_plus: AffineFrequency  # delta_plus - delta_c
    raman_minus: AffineFrequency  # delta_minus - delta_c


@dataclass(frozen=True)
class EffectiveCoefficients:
    """Envelope-Hamiltonian coefficients b0_j (rad/s) and b1_j (rad/(s m))
    for the two circular polarizations, plus their difference and average
    combinations used by the postselection formulas."""

    b0_plus: float
    b0_minus: float
    b1_plus: float
    b1_minus: float
    kappa_plus: float | None = None
    kappa_minus: float | None = None

    @property
    def b0(self) -> float:
        """Differential constant shift b0_+ - b0_-."""
        return self.b0_plus - self.b0_minus

    @property
    def b1(self) -> float:
        """Differential gradient b1_+ - b1_-."""
        return self.b1_plus - self.b1_minus

    @property
    def b0_bar(self) -> float:
        """Common-mode constant shift (b0_+ + b0_-)/2."""
        return 0.5 * (self.b0_plus + self.b0_minus)

    @property
    def b1_bar(self) -> float:
        """Common-mode gradient (b1_+ + b1_-)/2."""
        return 0.5 * (self.b1_plus + self.b1_minus)

    def b0_for(self, pol: str) -> float:
        return self.b0_plus if _check_pol(pol) == "+" else self.b0_minus

    def b1_for(self, pol: str) -> float:
        return self.b1_plus if _check_pol(pol) == "+" else self.b1_minus

    def as_dict(self) -> dict:
        out = {
            "b0_plus": self.b0_plus, "b0_minus": self.b0_minus,
            "b1_plus": self.b1_plus, "b1_minus": self.b1_minus,
            "b0_diff": self.b0, "b1_diff": self.b1,
            "b0_bar": self.b0_bar, "b1_bar": self.b1_bar,
        }
        if self.kappa_plus is not None:
            out["kappa_plus"] = self.kappa_plus
        if self.kappa_minus is not None:
            out["kappa_minus"] = self.kappa_minus
        return out


def _check_pol(pol: str) -> str:
    if pol not in ("+", "-"):
        raise ValueError(f"polarization must be '+' or '-', got {pol!r}")
    return pol


def coupling_strength(d_ej: float, nu: float, volume: float,
                      epsilon0: float = EPSILON_0) -> float:
    """Single-photon coupling rate g_j = d_ej sqrt(nu / (2 epsilon0 V hbar)).

    The hbar in the root converts the vacuum field amplitude per photon,
    sqrt(hbar nu / (2 epsilon0 V)), into a rate when multiplied by d/hbar.
    """
    if volume <= 0.0:
        raise ValueError("volume must be positive")
    if nu <= 0.0:
        raise ValueError("carrier frequency must be positive")
    return d_ej * math.sqrt(nu / (2.0 * epsilon0 * volume * HBAR))


def raman_detunings(system: PhysicalSystem) -> Detunings:
    """Detunings of all couplings for B(x) = B0 + B1 x, kept affine in x."""
    lv, fl, mg = system.levels, system.fields, system.magnet

    def affine(omega_i: float, carrier: float, mu_i: float) -> AffineFrequency:
        const = omega_i - lv.omega_e + carrier + (mu_i - lv.mu_e) * mg.b0 / HBAR
        slope = (mu_i - lv.mu_e) * mg.b1 / HBAR
        return AffineFrequency(const=const, slope=slope)

    delta_plus = affine(lv.omega_plus, fl.nu, lv.mu_plus)
    delta_minus = affine(lv.omega_minus, fl.nu, lv.mu_minus)
    delta_c = affine(lv.omega_s, fl.nu_c, lv.mu_s)

    def raman(omega_j: float, mu_j: float) -> AffineFrequency:
        # Grouped so that exact two-photon resonance cancels to 0.0 in floats.
        const = ((omega_j + fl.nu) - lv.omega_s - fl.nu_c) + (mu_j - lv.mu_s) * mg.b0 / HBAR
        slope = (mu_j - lv.mu_s) * mg.b1 / HBAR
        return AffineFrequency(const=const, slope=slope)

    return Detunings(
        delta_plus=delta_plus,
        delta_minus=delta_minus,
        delta_c=delta_c,
        raman_plus=raman(lv.omega_plus, lv.mu_plus),
        raman_minus=raman(lv.omega_minus, lv.mu_minus),
    )


def linear_coherence(delta_j: float, g_j: float, e_j: complex,
                     omega_rabi: complex) -> complex:
    """First-order optical coherence -Delta_j g_j E_j / (2 Omega Omega*).

    Steady-state linear response of the driven tripod with gamma_g = 0;
    vanishes on two-photon resonance (dark state).
    """
    denom = omega_rabi * omega_rabi.conjugate()
    if denom == 0.0:
        raise ValueError("Rabi frequency must be nonzero")
    return -delta_j * g_j * e_j / (2.0 * denom)


def kappa_prefactor(n_atoms: float, g_j: float, omega_rabi: complex) -> float:
    """Collective response prefactor N |g_j|^2 / (2 |Omega|^2)."""
    omega_sq = abs(omega_rabi) ** 2
    if omega_sq == 0.0:
        raise ValueError("Rabi frequency must be nonzero to derive kappa")
    return n_atoms * g_j * g_j / (2.0 * omega_sq)


def effective_coefficients(system: PhysicalSystem) -> EffectiveCoefficients:
    """Envelope-Hamiltonian coefficients for both polarizations.

    kappa_j comes from the microscopic inputs (N, d_ej, Omega) unless the
    ensemble carries kappa_override, in which case the override is used for
    both branches.
    """
    lv, fl, mg, en = system.levels, system.fields, system.magnet, system.ensemble

    if en.kappa_override is not None:
        kappa_plus = kappa_minus = en.kappa_override
    else:
        g_plus = coupling_strength(fl.d_e_plus, fl.nu, en.volume, fl.epsilon0)
        g_minus = coupling_strength(fl.d_e_minus, fl.nu, en.volume, fl.epsilon0)
        kappa_plus = kappa_prefactor(en.n_atoms, g_plus, fl.omega_rabi)
        kappa_minus = kappa_prefactor(en.n_atoms, g_minus, fl.omega_rabi)

    def branch(kappa: float, omega_j: float, mu_j: float) -> tuple[float, float]:
        const = ((omega_j + fl.nu) - lv.omega_s - fl.nu_c) + (mu_j - lv.mu_s) * mg.b0 / HBAR
        slope = (mu_j - lv.mu_s) * mg.b1 / HBAR
        return kappa * const, kappa * slope

    b0_plus, b1_plus = branch(kappa_plus, lv.omega_plus, lv.mu_plus)
    b0_minus, b1_minus = branch(kappa_minus, lv.omega_minus, lv.mu_minus)

    return EffectiveCoefficients(
        b0_plus=b0_plus, b0_minus=b0_minus,
        b1_plus=b1_plus, b1_minus=b1_minus,
        kappa_plus=kappa_plus, kappa_minus=kappa_minus,
    )
