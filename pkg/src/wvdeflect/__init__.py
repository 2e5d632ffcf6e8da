"""Tripod-EIT beam-deflection simulator.

A dispersive atomic ensemble in a tripod configuration imprints
polarization-dependent phases on a probe beam crossing a transverse
magnetic-field gradient: an optical Stern-Gerlach momentum split.
Pre/postselecting the polarization turns the transverse profile into a
weak-measurement meter whose centroid shift can dwarf the bare split.
This package computes the effective-Hamiltonian coefficients, the exact
closed-form meter statistics, their first-order (weak-value) counterparts,
and checks everything against a grid-based spectral oracle.
"""

from .analytic import (GaussianMeter, PostselectedDensity,
                       UndefinedPostselectionError, evolved_envelope,
                       initial_envelope, mean_x, momentum_envelope,
                       overlap_factor, postselect_probability,
                       postselected_density, reshaped_gaussian_paper, var_x)
from .cli import TOOL_VERSION as __version__
from .cli import export_dataset, main, run_scenario
from .medium import (AffineFrequency, Detunings, EffectiveCoefficients,
                     coupling_strength, effective_coefficients,
                     kappa_prefactor, linear_coherence, raman_detunings)
from .physparams import (BeamConfig, ConfigError, EnsembleGeometry, FieldSet,
                         LevelSet, MagnetProfile, PhysicalSystem, RegimeReport,
                         calibrate_kappa, default_system, dump_config,
                         load_config, loads_config, save_config,
                         validate_regime)
from .propagator import (BoundaryMassError, Grid1D, GridTooSmallError, Moments,
                         SpinorField, dft_spectrum, field_table, init_field,
                         moments, postselect_field, propagate)
from .weakmeas import (KARPA_WEITZ_DEFLECTION_RAD, Observable2,
                       OrthogonalSelectionError, Qubit, SIGMA_Z, H_STATE,
                       V_STATE, aav_mean_shift, deflection_angle, evolved_pre,
                       optimal_theta, preselect, weak_value)

__all__ = [name for name in dir() if not name.startswith("_")]
