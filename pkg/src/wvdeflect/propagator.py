"""Grid-based spinor-field oracle for the analytic results.

Because the envelope Hamiltonian of each polarization branch commutes with
x and contains no transverse kinetic term, evolution in the transverse
coordinate is an exact diagonal phase: this module's value is that it is an
independent implementation (grid sampling, FFT, trapezoidal moments), not
that it performs sophisticated time stepping.  The longitudinal translation
z -> z - c t is bookkept analytically and never discretized.

Discrete Fourier convention matches the analytic one,
F(k) = integral E(x) exp(-i k x) dx, realized as
F(k_q) = dx exp(-i k_q x_0) FFT(E)_q on the shifted frequency grid, so the
position norm sum |E|^2 dx and momentum norm sum |F|^2 dk/(2 pi) agree to
rounding exactly (discrete Parseval).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import UndefinedPostselectionError
from .medium import EffectiveCoefficients
from .weakmeas import Qubit


class GridTooSmallError(ValueError):
    """Grid extent cannot contain the requested beam."""


class BoundaryMassError(ValueError):
    """Density has not decayed at the grid boundary: moments untrustworthy."""


DEFAULT_N_POINTS = 2 ** 14
MIN_N_POINTS = 2 ** 10
BOUNDARY_DENSITY_TOL = 1e-12  # boundary-to-peak density ratio moments tolerate


@dataclass(frozen=True)
class Grid1D:
    """Uniform transverse grid, symmetric about x = 0.

    n_points must be a power of two (>= 2^10).  Conjugate momentum grid has
    spacing dk = 2 pi / extent and the same symmetric layout.
    """

    n_points: int
    extent: float  # m, total width; points at (i - n/2) * dx
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.n_points
        if n < MIN_N_POINTS or (n & (n - 1)) != 0:
            raise ValueError(f"n_points must be a power of two >= {MIN_N_POINTS}, got {n}")
        if not (self.extent > 0.0 and math.isfinite(self.extent)):
            raise ValueError(f"extent must be positive and finite, got {self.extent}")
        idx = np.arange(n) - n // 2
        x = idx * self.dx
        k = idx * self.dk
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def dx(self) -> float:
        return self.extent / self.n_points

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.extent


def _frozen_copy(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpinorField:
    """Immutable snapshot of the two-polarization envelope on a grid.

    domain is "position" (arrays over grid.x) or "momentum" (over grid.k).
    """

    grid: Grid1D
    e_plus: np.ndarray = field(repr=False, compare=False)
    e_minus: np.ndarray = field(repr=False, compare=False)
    time: float = 0.0
    domain: str = "position"

    def __post_init__(self) -> None:
        if self.domain not in ("position", "momentum"):
            raise ValueError(f"domain must be 'position' or 'momentum', got {self.domain!r}")
        for name in ("e_plus", "e_minus"):
            arr = _frozen_copy(getattr(self, name))
            if arr.shape != (self.grid.n_points,):
                raise ValueError(f"{name} must have shape ({self.grid.n_points},)")
            object.__setattr__(self, name, arr)

    @property
    def coords(self) -> np.ndarray:
        return self.grid.x if self.domain == "position" else self.grid.k

    @property
    def _measure(self) -> float:
        # dk carries the 1/(2 pi) of the inverse-transform measure so that
        # the discrete Parseval identity is exact.
        if self.domain == "position":
            return self.grid.dx
        return self.grid.dk / (2.0 * math.pi)

    def densities(self) -> tuple[np.ndarray, np.ndarray]:
        return np.abs(self.e_plus) ** 2, np.abs(self.e_minus) ** 2

    @property
    def populations(self) -> tuple[float, float]:
        dp, dm = self.densities()
        w = self._measure
        return float(np.sum(dp) * w), float(np.sum(dm) * w)

    @property
    def norm(self) -> float:
        p, m = self.populations
        return p + m


def init_field(grid: Grid1D, a: float, alpha: float) -> SpinorField:
    """Input spinor field: both branches share the unit-norm transverse
    Gaussian marginal, weighted by (exp(-i alpha/2), exp(i alpha/2))/sqrt(2)."""
    if a <= 0.0:
        raise ValueError("beam width a must be positive")
    if grid.extent < 8.0 * a:
        raise GridTooSmallError(
            f"extent {grid.extent} shorter than 8 beam widths ({8.0 * a})")
    marginal = (2.0 * math.pi * a * a) ** -0.25 * np.exp(-grid.x ** 2 / (4.0 * a * a))
    w = 1.0 / math.sqrt(2.0)
    return SpinorField(
        grid=grid,
        e_plus=np.exp(-0.5j * alpha) * w * marginal,
        e_minus=np.exp(0.5j * alpha) * w * marginal,
        time=0.0,
        domain="position",
    )


def propagate(fld: SpinorField, coeffs: EffectiveCoefficients, t: float,
              steps: int = 1) -> SpinorField:
    """Evolve for duration t: exact diagonal phases exp(-i (b0_j + b1_j x) t).

    steps > 1 splits t into equal substeps purely to exercise the stepping
    machinery; the result must agree with a single step to rounding because
    the phases commute.  No component mixing, no norm change.
    """
    if fld.domain != "position":
        raise ValueError("propagation acts on position-domain fields")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    dt = t / steps
    e_plus, e_minus = fld.e_plus, fld.e_minus
    for _ in range(steps):
        e_plus = e_plus * np.exp(-1j * (coeffs.b0_plus + coeffs.b1_plus * fld.grid.x) * dt)
        e_minus = e_minus * np.exp(-1j * (coeffs.b0_minus + coeffs.b1_minus * fld.grid.x) * dt)
    return SpinorField(grid=fld.grid, e_plus=e_plus, e_minus=e_minus,
                       time=fld.time + t, domain="position")


def dft_spectrum(fld: SpinorField) -> SpinorField:
    """Discrete realization of F(k) = integral E(x) exp(-i k x) dx."""
    if fld.domain != "position":
        raise ValueError("dft_spectrum expects a position-domain field")
    grid = fld.grid
    phase = grid.dx * np.exp(-1j * grid.k * grid.x[0])

    def transform(e: np.ndarray) -> np.ndarray:
        return phase * np.fft.fftshift(np.fft.fft(e))

    return SpinorField(grid=grid, e_plus=transform(fld.e_plus),
                       e_minus=transform(fld.e_minus),
                       time=fld.time, domain="momentum")


@dataclass(frozen=True)
class Moments:
    norm: float
    mean: float
    variance: float

    def as_dict(self) -> dict:
        return {"norm": self.norm, "mean": self.mean, "variance": self.variance}


def moments(coords: np.ndarray, density: np.ndarray,
            boundary_tol: float = BOUNDARY_DENSITY_TOL) -> Moments:
    """Trapezoidal norm/centroid/variance of a sampled density.

    Refuses when the density at either grid end exceeds boundary_tol of its
    peak (the grid is too small to hold the distribution), and reports a
    zero-norm density as an undefined postselection rather than NaN.
    """
    coords = np.asarray(coords, dtype=float)
    density = np.asarray(density, dtype=float)
    if coords.shape != density.shape or coords.ndim != 1:
        raise ValueError("coords and density must be 1-D arrays of equal length")
    if np.any(density < 0.0):
        raise ValueError("density samples must be nonnegative")
    peak = float(np.max(density)) if density.size else 0.0
    if peak > 0.0 and max(density[0], density[-1]) > boundary_tol * peak:
        raise BoundaryMassError(
            f"boundary density {max(density[0], density[-1]):.3e} exceeds "
            f"{boundary_tol:.1e} of peak {peak:.3e}")
    norm = float(np.trapezoid(density, coords))
    if norm <= 0.0:
        raise UndefinedPostselectionError("density carries no probability mass")
    mean = float(np.trapezoid(coords * density, coords)) / norm
    centered = coords - mean
    variance = float(np.trapezoid(centered * centered * density, coords)) / norm
    return Moments(norm=norm, mean=mean, variance=variance)


def postselect_field(fld: SpinorField, post: Qubit) -> np.ndarray:
    """Pointwise projection <post|Phi(x)>: the scalar meter amplitude left
    after selecting the polarization state post."""
    return (np.conj(post.c_plus) * fld.e_plus
            + np.conj(post.c_minus) * fld.e_minus)


def field_table(fld: SpinorField) -> tuple[list[str], list[tuple]]:
    """Rows (coordinate, Re/Im of both components) for CSV export."""
    label = "x_m" if fld.domain == "position" else "k_x_per_m"
    columns = [label, "re_plus", "im_plus", "re_minus", "im_minus"]
    rows = [
        (float(c), ep.real, ep.imag, em.real, em.imag)
        for c, ep, em in zip(fld.coords, fld.e_plus, fld.e_minus)
    ]
    return columns, rows
