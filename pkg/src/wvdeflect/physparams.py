"""Physical parameters of the tripod-EIT deflection experiment.

Everything is SI with hbar kept explicit: level energies are angular
frequencies (rad/s), magnetic moments are J/T, and every magnetic energy
mu*B is divided by hbar where it enters a frequency.  This lets tabulated
values (J/T, T/m, rad/s) be entered verbatim in the configuration file.

The configuration format is INI-style with five sections (levels, fields,
magnet, ensemble, beam).  Unknown sections or keys are a hard error, and
serialize/reload round-trips every float bit-exactly.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields as dataclass_fields
from importlib import resources
from pathlib import Path

from .constants import C_LIGHT, EPSILON_0, HBAR


class ConfigError(ValueError):
    """Malformed, unknown, or physically invalid configuration input."""


def _require_finite(obj, names: tuple[str, ...]) -> None:
    for name in names:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise ConfigError(f"{type(obj).__name__}.{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class LevelSet:
    """Bare level energies (rad/s) and magnetic moments (J/T) of the tripod.

    The two ground sublevels sit at omega_plus/omega_minus, the auxiliary
    ground state at omega_s, the shared excited state at omega_e.  Moments
    are stored as the product m_F * g_F * mu_B directly.
    """

    omega_plus: float
    omega_minus: float
    omega_s: float
    omega_e: float
    mu_plus: float
    mu_minus: float
    mu_s: float
    mu_e: float

    def __post_init__(self) -> None:
        _require_finite(self, ("omega_plus", "omega_minus", "omega_s", "omega_e",
                               "mu_plus", "mu_minus", "mu_s", "mu_e"))

    @property
    def is_degenerate(self) -> bool:
        """True when the two ground sublevels coincide at B = 0."""
        return self.omega_plus == self.omega_minus


@dataclass(frozen=True)
class FieldSet:
    """Optical-field parameters: probe and control carriers, Rabi frequency,
    dipole matrix elements and relaxation rates."""

    nu: float  # probe carrier angular frequency (rad/s)
    nu_c: float  # control carrier angular frequency (rad/s)
    k: float  # probe wavenumber (1/m), bookkeeping only
    k_c: float  # control wavenumber (1/m), bookkeeping only
    omega_rabi: complex  # control-field Rabi frequency (rad/s)
    d_e_plus: float  # dipole matrix element |e> <-> |+> (C m)
    d_e_minus: float  # dipole matrix element |e> <-> |-> (C m)
    gamma_e: float  # excited-state decay rate (rad/s)
    gamma_g: float  # ground-coherence relaxation rate (rad/s)
    epsilon0: float = EPSILON_0

    def __post_init__(self) -> None:
        _require_finite(self, ("nu", "nu_c", "k", "k_c", "d_e_plus", "d_e_minus",
                               "gamma_e", "gamma_g", "epsilon0"))
        if abs(self.omega_rabi) == 0.0:
            raise ConfigError("Rabi frequency must be nonzero")
        if self.gamma_e < 0.0 or self.gamma_g < 0.0:
            raise ConfigError("relaxation rates must be nonnegative")
        if self.epsilon0 <= 0.0:
            raise ConfigError("epsilon0 must be positive")


@dataclass(frozen=True)
class MagnetProfile:
    """Magnetic field along z with a transverse gradient: B(x) = B0 + B1*x."""

    b0: float  # T
    b1: float  # T/m

    def __post_init__(self) -> None:
        _require_finite(self, ("b0", "b1"))

    def at(self, x: float) -> float:
        return self.b0 + self.b1 * x


@dataclass(frozen=True)
class EnsembleGeometry:
    """Atom number, medium volume and cell length.

    kappa_override, when set, replaces the derived dimensionless prefactor
    N |g_j|^2 / (2 |Omega|^2) for both polarizations; use it to calibrate
    the optical response when the microscopic inputs are not trusted.
    """

    n_atoms: float
    volume: float  # m^3
    length: float  # m, cell length along z
    kappa_override: float | None = None

    def __post_init__(self) -> None:
        _require_finite(self, ("n_atoms", "volume", "length"))
        if self.n_atoms < 1:
            raise ConfigError("n_atoms must be at least 1")
        if self.volume <= 0.0 or self.length <= 0.0:
            raise ConfigError("volume and length must be positive")
        if self.kappa_override is not None and not math.isfinite(self.kappa_override):
            raise ConfigError("kappa_override must be finite when given")


T_F_MODES = ("L_over_c", "L_over_vg")


@dataclass(frozen=True)
class BeamConfig:
    """Probe-beam envelope width, polarization angle and interaction time."""

    a: float  # m, Gaussian width parameter
    alpha: float  # rad, polarization angle of the linear input polarization
    t_f: float  # s, interaction time with the medium
    t_f_mode: str = "L_over_c"
    v_g: float | None = None  # m/s, group velocity used by the L_over_vg mode

    def __post_init__(self) -> None:
        _require_finite(self, ("a", "alpha", "t_f"))
        if self.a <= 0.0:
            raise ConfigError("beam width a must be positive")
        if self.t_f <= 0.0:
            raise ConfigError("interaction time t_f must be positive")
        if self.t_f_mode not in T_F_MODES:
            raise ConfigError(f"t_f_mode must be one of {T_F_MODES}, got {self.t_f_mode!r}")
        if self.t_f_mode == "L_over_vg" and (self.v_g is None or self.v_g <= 0.0):
            raise ConfigError("t_f_mode L_over_vg requires a positive v_g")

    @staticmethod
    def interaction_time(mode: str, length: float, v_g: float | None = None) -> float:
        """Interaction time for a cell of the given length."""
        if mode == "L_over_c":
            return length / C_LIGHT
        if mode == "L_over_vg":
            if v_g is None or v_g <= 0.0:
                raise ConfigError("t_f_mode L_over_vg requires a positive v_g")
            return length / v_g
        raise ConfigError(f"t_f_mode must be one of {T_F_MODES}, got {mode!r}")


@dataclass(frozen=True)
class PhysicalSystem:
    """Immutable bundle of every physical input the simulator consumes."""

    levels: LevelSet
    fields: FieldSet
    magnet: MagnetProfile
    ensemble: EnsembleGeometry
    beam: BeamConfig

    @property
    def t_f(self) -> float:
        return self.beam.t_f


# --------------------------------------------------------------------------
# Regime validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    """Dimensionless checks behind the effective-Hamiltonian treatment.

    The three strong-driving ratios must be large for the adiabatic
    linear-response elimination to hold; the weak-coupling product
    a*|b1|*t_f must be small for the first-order (weak-value) reading of
    the meter.  Ratios with a vanishing denominator are reported infinite.
    """

    ratio_saturation: float  # |Omega|^2 / (Gamma * gamma_g)
    ratio_detuning: float  # |Omega|^2 / max_j,x Delta_j(x)^2
    ratio_zeeman: float  # |Omega| / (|mu_+ - mu_-| B_max / hbar)
    weak_coupling: float  # a * |b1| * t_f
    strong_threshold: float
    weak_threshold: float
    x_span: float  # m, transverse half-width over which B was scanned

    @property
    def saturation_ok(self) -> bool:
        return self.ratio_saturation >= self.strong_threshold

    @property
    def detuning_ok(self) -> bool:
        return self.ratio_detuning >= self.strong_threshold

    @property
    def zeeman_ok(self) -> bool:
        return self.ratio_zeeman >= self.strong_threshold

    @property
    def weak_coupling_ok(self) -> bool:
        return self.weak_coupling <= self.weak_threshold

    @property
    def strong_driving_ok(self) -> bool:
        """All conditions required for the effective Hamiltonian itself.

        The weak-coupling flag is deliberately excluded: a large a*|b1|*t_f
        only degrades the first-order meter reading, which this package
        computes exactly anyway; it does not invalidate the simulation.
        """
        return self.saturation_ok and self.detuning_ok and self.zeeman_ok

    def as_dict(self) -> dict:
        return {
            "ratio_saturation": self.ratio_saturation,
            "ratio_detuning": self.ratio_detuning,
            "ratio_zeeman": self.ratio_zeeman,
            "weak_coupling": self.weak_coupling,
            "saturation_ok": self.saturation_ok,
            "detuning_ok": self.detuning_ok,
            "zeeman_ok": self.zeeman_ok,
            "weak_coupling_ok": self.weak_coupling_ok,
            "strong_driving_ok": self.strong_driving_ok,
            "strong_threshold": self.strong_threshold,
            "weak_threshold": self.weak_threshold,
            "x_span": self.x_span,
        }


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    return num / den


def validate_regime(system: PhysicalSystem, coeffs, beam: BeamConfig | None = None, *,
                    strong_threshold: float = 100.0, weak_threshold: float = 0.3,
                    x_span: float | None = None) -> RegimeReport:
    """Report the strong-driving and weak-coupling figures of merit.

    Pure reporting: never raises for out-of-regime values.  The magnetic
    field and the Raman detunings are scanned over |x| <= x_span, which
    defaults to eight beam widths (the default numeric grid half-extent).
    """
    from .medium import raman_detunings  # deferred: medium depends on this module

    if beam is None:
        beam = system.beam
    if x_span is None:
        x_span = 8.0 * beam.a

    fl = system.fields
    lv = system.levels
    omega_sq = abs(fl.omega_rabi) ** 2

    ratio_saturation = _safe_ratio(omega_sq, fl.gamma_e * fl.gamma_g)

    det = raman_detunings(system)
    delta_max_sq = max(
        det.raman_plus.at(-x_span) ** 2,
        det.raman_plus.at(x_span) ** 2,
        det.raman_minus.at(-x_span) ** 2,
        det.raman_minus.at(x_span) ** 2,
    )
    ratio_detuning = _safe_ratio(omega_sq, delta_max_sq)

    b_max = max(abs(system.magnet.at(-x_span)), abs(system.magnet.at(x_span)))
    zeeman_rate = abs(lv.mu_plus - lv.mu_minus) * b_max / HBAR
    ratio_zeeman = _safe_ratio(abs(fl.omega_rabi), zeeman_rate)

    weak_coupling = beam.a * abs(coeffs.b1) * beam.t_f

    return RegimeReport(
        ratio_saturation=ratio_saturation,
        ratio_detuning=ratio_detuning,
        ratio_zeeman=ratio_zeeman,
        weak_coupling=weak_coupling,
        strong_threshold=strong_threshold,
        weak_threshold=weak_threshold,
        x_span=x_span,
    )


def calibrate_kappa(system: PhysicalSystem) -> float:
    """Dimensionless response prefactor that pins the Stern-Gerlach split.

    Solves kappa * |mu_+ - mu_s| * |B1| / hbar * t_f = 1/a, i.e. the
    sigma_+ momentum-space displacement |b1_+| t_f equals twice the
    momentum density rms width 1/(2a).  Used to generate the shipped
    default configuration, where the microscopic N |g|^2 / |Omega|^2 is
    not independently known.
    """
    delta_mu = abs(system.levels.mu_plus - system.levels.mu_s)
    denom = delta_mu * abs(system.magnet.b1) * system.beam.a * system.beam.t_f
    if denom == 0.0:
        raise ConfigError("calibration undefined: mu_+ = mu_s, B1 = 0, or degenerate beam")
    return HBAR / denom


# --------------------------------------------------------------------------
# Configuration file I/O
# --------------------------------------------------------------------------

_FLOAT_KEYS = {
    "levels": ("omega_plus", "omega_minus", "omega_s", "omega_e",
               "mu_plus", "mu_minus", "mu_s", "mu_e"),
    "fields": ("nu", "nu_c", "k", "k_c", "omega_re", "omega_im",
               "d_e_plus", "d_e_minus", "gamma", "gamma_g", "epsilon0"),
    "magnet": ("b0", "b1"),
    "ensemble": ("n_atoms", "volume", "length"),
    "beam": ("a", "alpha"),
}
_OPTIONAL_KEYS = {
    "levels": ("assert_degenerate",),
    "ensemble": ("kappa_override",),
    "beam": ("t_f", "t_f_mode", "v_g"),
}


def _parse_float(section: str, key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: not a number: {text!r}") from exc
    return value


def _read_parser(parser: configparser.ConfigParser) -> PhysicalSystem:
    known = set(_FLOAT_KEYS)
    seen = set(parser.sections())
    if seen - known:
        raise ConfigError(f"unknown config section(s): {sorted(seen - known)}")
    if known - seen:
        raise ConfigError(f"missing config section(s): {sorted(known - seen)}")

    values: dict[str, dict[str, float]] = {}
    for section, keys in _FLOAT_KEYS.items():
        optional = _OPTIONAL_KEYS.get(section, ())
        present = set(parser.options(section))
        allowed = set(keys) | set(optional)
        if present - allowed:
            raise ConfigError(f"unknown key(s) in [{section}]: {sorted(present - allowed)}")
        missing = set(keys) - present
        if missing:
            raise ConfigError(f"missing key(s) in [{section}]: {sorted(missing)}")
        values[section] = {k: _parse_float(section, k, parser.get(section, k)) for k in keys}

    lv = values["levels"]
    levels = LevelSet(
        omega_plus=lv["omega_plus"], omega_minus=lv["omega_minus"],
        omega_s=lv["omega_s"], omega_e=lv["omega_e"],
        mu_plus=lv["mu_plus"], mu_minus=lv["mu_minus"],
        mu_s=lv["mu_s"], mu_e=lv["mu_e"],
    )
    if parser.has_option("levels", "assert_degenerate"):
        try:
            want = parser.getboolean("levels", "assert_degenerate")
        except ValueError as exc:
            raise ConfigError("[levels] assert_degenerate: not a boolean") from exc
        if want and not levels.is_degenerate:
            raise ConfigError("assert_degenerate set but omega_plus != omega_minus")

    fv = values["fields"]
    fields = FieldSet(
        nu=fv["nu"], nu_c=fv["nu_c"], k=fv["k"], k_c=fv["k_c"],
        omega_rabi=complex(fv["omega_re"], fv["omega_im"]),
        d_e_plus=fv["d_e_plus"], d_e_minus=fv["d_e_minus"],
        gamma_e=fv["gamma"], gamma_g=fv["gamma_g"], epsilon0=fv["epsilon0"],
    )

    magnet = MagnetProfile(b0=values["magnet"]["b0"], b1=values["magnet"]["b1"])

    kappa = None
    if parser.has_option("ensemble", "kappa_override"):
        kappa = _parse_float("ensemble", "kappa_override", parser.get("ensemble", "kappa_override"))
    ev = values["ensemble"]
    ensemble = EnsembleGeometry(n_atoms=ev["n_atoms"], volume=ev["volume"],
                                length=ev["length"], kappa_override=kappa)

    mode = parser.get("beam", "t_f_mode", fallback="L_over_c").strip()
    v_g = None
    if parser.has_option("beam", "v_g"):
        v_g = _parse_float("beam", "v_g", parser.get("beam", "v_g"))
    if parser.has_option("beam", "t_f"):
        t_f = _parse_float("beam", "t_f", parser.get("beam", "t_f"))
    else:
        t_f = BeamConfig.interaction_time(mode, ensemble.length, v_g)
    bv = values["beam"]
    beam = BeamConfig(a=bv["a"], alpha=bv["alpha"], t_f=t_f, t_f_mode=mode, v_g=v_g)

    return PhysicalSystem(levels=levels, fields=fields, magnet=magnet,
                          ensemble=ensemble, beam=beam)


def loads_config(text: str) -> PhysicalSystem:
    """Parse a configuration from a string."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return _read_parser(parser)


def load_config(path: str | Path) -> PhysicalSystem:
    """Parse a configuration file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads_config(text)


def load_config_with_overrides(path: str | Path,
                               overrides: dict[str, str]) -> PhysicalSystem:
    """Parse a configuration file, then patch individual keys.

    Override keys use the dotted form "section.key"; only keys the schema
    knows are accepted.  Values are parsed exactly as if they appeared in
    the file.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    for dotted, value in overrides.items():
        section, _, key = dotted.partition(".")
        if not key:
            raise ConfigError(f"override {dotted!r} is not of the form section.key")
        allowed = set(_FLOAT_KEYS.get(section, ())) | set(_OPTIONAL_KEYS.get(section, ()))
        if not allowed:
            raise ConfigError(f"override names unknown section {section!r}")
        if key not in allowed:
            raise ConfigError(f"override names unknown key {key!r} in [{section}]")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
    return _read_parser(parser)


def system_as_dict(system: PhysicalSystem) -> dict:
    """Nested plain-type view of every field, for manifests."""
    lv, fl, mg, en, bm = (system.levels, system.fields, system.magnet,
                          system.ensemble, system.beam)
    return {
        "levels": {f.name: getattr(lv, f.name) for f in dataclass_fields(lv)},
        "fields": {
            "nu": fl.nu, "nu_c": fl.nu_c, "k": fl.k, "k_c": fl.k_c,
            "omega_re": fl.omega_rabi.real, "omega_im": fl.omega_rabi.imag,
            "d_e_plus": fl.d_e_plus, "d_e_minus": fl.d_e_minus,
            "gamma": fl.gamma_e, "gamma_g": fl.gamma_g, "epsilon0": fl.epsilon0,
        },
        "magnet": {"b0": mg.b0, "b1": mg.b1},
        "ensemble": {"n_atoms": en.n_atoms, "volume": en.volume,
                     "length": en.length, "kappa_override": en.kappa_override},
        "beam": {"a": bm.a, "alpha": bm.alpha, "t_f": bm.t_f,
                 "t_f_mode": bm.t_f_mode, "v_g": bm.v_g},
    }


def dump_config(system: PhysicalSystem) -> str:
    """Serialize to the config format; reloading reproduces all fields bit-exactly."""
    lv, fl, mg, en, bm = (system.levels, system.fields, system.magnet,
                          system.ensemble, system.beam)
    lines = ["[levels]"]
    for f in dataclass_fields(lv):
        lines.append(f"{f.name} = {getattr(lv, f.name)!r}")
    lines += [
        "",
        "[fields]",
        f"nu = {fl.nu!r}",
        f"nu_c = {fl.nu_c!r}",
        f"k = {fl.k!r}",
        f"k_c = {fl.k_c!r}",
        f"omega_re = {fl.omega_rabi.real!r}",
        f"omega_im = {fl.omega_rabi.imag!r}",
        f"d_e_plus = {fl.d_e_plus!r}",
        f"d_e_minus = {fl.d_e_minus!r}",
        f"gamma = {fl.gamma_e!r}",
        f"gamma_g = {fl.gamma_g!r}",
        f"epsilon0 = {fl.epsilon0!r}",
        "",
        "[magnet]",
        f"b0 = {mg.b0!r}",
        f"b1 = {mg.b1!r}",
        "",
        "[ensemble]",
        f"n_atoms = {en.n_atoms!r}",
        f"volume = {en.volume!r}",
        f"length = {en.length!r}",
    ]
    if en.kappa_override is not None:
        lines.append(f"kappa_override = {en.kappa_override!r}")
    lines += [
        "",
        "[beam]",
        f"a = {bm.a!r}",
        f"alpha = {bm.alpha!r}",
        f"t_f = {bm.t_f!r}",
        f"t_f_mode = {bm.t_f_mode}",
    ]
    if bm.v_g is not None:
        lines.append(f"v_g = {bm.v_g!r}")
    return "\n".join(lines) + "\n"


def save_config(system: PhysicalSystem, path: str | Path) -> None:
    Path(path).write_text(dump_config(system), encoding="utf-8", newline="\n")


def default_config_path() -> Path:
    """Path of the packaged default parameter file."""
    return Path(resources.files("wvdeflect").joinpath("data/default.cfg"))


def default_system() -> PhysicalSystem:
    """The shipped rubidium D1 tripod parameter set."""
    return load_config(default_config_path())
