"""Physical constants, atomic species, beamline geometry and run configuration.

Internal units are strictly SI with angular frequencies (rad/s).  The
configuration file is the only other unit surface: JSON with units spelled
in the key names (mm, cm, kHz, mrad), documented in the README.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _codata

from .laser import LaserGeometry
from .velocity import VelocityDistribution

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "AtomSpecies",
    "BeamlineGeometry",
    "GridSpec",
    "Flags",
    "SweepSpec",
    "RunConfig",
    "ConfigError",
    "derive_species",
    "load_config",
    "config_from_dict",
    "serialize_config",
    "default_config",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used throughout; fixed, not configurable."""

    hbar: float = _codata.hbar            # J s
    k_boltzmann: float = _codata.k        # J/K
    c_light: float = _codata.c            # m/s
    amu: float = _codata.atomic_mass      # kg


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom: mass, transition wavelength and decay rate.

    Derived quantities follow from the wavevector k = 2 pi / wavelength:
    recoil shift hbar k^2 / 2m and clock frequency c k.
    """

    mass: float          # kg
    wavelength: float    # m
    decay_rate: float    # 1/s (gamma, angular)

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if self.mass <= 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if self.decay_rate < 0:
            raise ValueError(f"decay_rate must be >= 0, got {self.decay_rate}")

    @property
    def wavevector(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def recoil_shift(self) -> float:
        """delta = hbar k^2 / 2m (rad/s)."""
        return CONSTANTS.hbar * self.wavevector**2 / (2.0 * self.mass)

    @property
    def clock_frequency(self) -> float:
        """omega_c = c k (rad/s)."""
        return CONSTANTS.c_light * self.wavevector


def derive_species(wavelength: float, mass: float, decay_rate: float) -> AtomSpecies:
    """Validated species with k, recoil shift and clock frequency populated."""
    return AtomSpecies(mass=mass, wavelength=wavelength, decay_rate=decay_rate)


@dataclass(frozen=True)
class BeamlineGeometry:
    """Four interaction-zone positions along the folded optical path.

    ``ramsey_separation`` d_r is the atomic-path distance between the two
    crossings of each Ramsey pair.  Zone positions need not be monotonic:
    the beam is folded, so optical order differs from atomic order.
    """

    zone_positions: tuple[float, float, float, float]  # m along optical path
    ramsey_separation: float                           # m along atomic path

    def __post_init__(self):
        if len(self.zone_positions) != 4:
            raise ValueError("exactly four zone positions required")
        if self.ramsey_separation <= 0:
            raise ValueError("ramsey_separation must be > 0")

    @property
    def mean_position(self) -> float:
        return sum(self.zone_positions) / 4.0

    @property
    def path_sum(self) -> float:
        """l_s = (l1 - l2) + (l3 - l4); always derived, never configured."""
        l1, l2, l3, l4 = self.zone_positions
        return (l1 - l2) + (l3 - l4)


@dataclass(frozen=True)
class GridSpec:
    n_speed: int = 400
    n_transverse: int = 40
    speed_min: float = 100.0   # m/s
    speed_max: float = 2200.0  # m/s

    def __post_init__(self):
        if self.n_speed < 1 or self.n_transverse < 1:
            raise ValueError("grid counts must be >= 1")
        if not self.speed_max >= self.speed_min > 0:
            raise ValueError("need 0 < speed_min <= speed_max")


@dataclass(frozen=True)
class Flags:
    relativistic_doppler: bool = False
    decay: bool = True
    # Paper-style population decay factors by default; the amplitude-level
    # alternative halves the exponent on the fringe envelope.
    amplitude_decay: bool = False


@dataclass(frozen=True)
class SweepSpec:
    parameter: str   # "waist_position" | "waist_radius"
    start: float     # m
    stop: float      # m
    num: int
    with_stability: bool = False

    def __post_init__(self):
        if self.parameter not in ("waist_position", "waist_radius"):
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if self.num < 1:
            raise ValueError("sweep num must be >= 1")
        if not self.stop >= self.start:
            raise ValueError("sweep stop must be >= start")


@dataclass(frozen=True)
class RunConfig:
    """Fully validated simulation input; immutable and safe to share."""

    species: AtomSpecies
    beamline: BeamlineGeometry
    laser: LaserGeometry
    velocity: VelocityDistribution
    detuning_grid: tuple[float, ...]   # rad/s, strictly increasing
    flags: Flags = Flags()
    grid: GridSpec = GridSpec()
    sweep: SweepSpec | None = None
    # (min_khz, max_khz, num, relative_to_recoil) as read from the file;
    # kept so serialization round-trips the grid exactly.
    detuning_spec: tuple[float, float, int, bool] | None = None

    def __post_init__(self):
        d = np.asarray(self.detuning_grid)
        if d.size < 1:
            raise ValueError("detuning_grid must not be empty")
        if d.size > 1 and not np.all(np.diff(d) > 0):
            raise ValueError("detuning_grid must be strictly increasing")

    @property
    def gamma(self) -> float:
        """Effective decay rate honouring the decay flag (1/s)."""
        return self.species.decay_rate if self.flags.decay else 0.0

    def detunings(self) -> np.ndarray:
        return np.asarray(self.detuning_grid, dtype=float)


class ConfigError(ValueError):
    """Configuration parse or validation failure, naming the offending field."""


# --- file schema ------------------------------------------------------------
#
# Defaults reproduce the reference beamline: zones {0, 51, 77, 30} cm,
# d_r = 9 cm, Ca-40 at 657 nm, 625 K oven, 0.5 m/s transverse width at the
# 610 m/s normalisation speed.  The default wavelength carries a 2.4 ppm
# offset inside the quoted 657 nm: the cm-precision zone positions leave the
# spatial fringe phase k*l_s undetermined modulo 2 pi, and this value pins it
# to the reported constant shift of a few tens of Hz (see README).

DEFAULT_CONFIG: dict = {
    "species": {
        "wavelength_nm": 656.997677,
        "mass_amu": 40.0,
        "linewidth_hz": 370.0,
    },
    "beamline": {
        "zone_positions_cm": [0.0, 51.0, 77.0, 30.0],
        "ramsey_separation_cm": 9.0,
    },
    "laser": {
        "waist_position_cm": 39.5,
        "waist_radius_mm": 0.125,
        "target_pulse_area_pi": 0.5,
        "plane_wave": True,
        "include_chirp": True,
        "include_gouy": True,
    },
    "velocity": {
        "boltzmann_exponent": 3,
        "temperature_k": 625.0,
        "transverse_width_base_m_per_s": 0.5,
        "tilt_mrad": 0.0,
        "mean_speed_m_per_s": 610.0,
        "transverse_profile": "gaussian",
    },
    "grid": {
        "n_speed": 400,
        "n_transverse": 40,
        "speed_min_m_per_s": 100.0,
        "speed_max_m_per_s": 2200.0,
    },
    "detuning": {
        "min_khz": -10.0,
        "max_khz": 10.0,
        "num": 2001,
        "relative_to_recoil": True,
    },
    "flags": {
        "relativistic_doppler": False,
        "decay": True,
        "amplitude_decay": False,
    },
}

_BOOL_KEYS = {
    "plane_wave", "include_chirp", "include_gouy",
    "relativistic_doppler", "decay", "amplitude_decay", "relative_to_recoil",
    "with_stability",
}
_INT_KEYS = {"n_speed", "n_transverse", "num", "boltzmann_exponent"}
_STR_KEYS = {"transverse_profile", "parameter"}


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(f"duplicated key {key!r}")
        seen[key] = value
    return seen


def _section(data: dict, name: str, defaults: dict) -> dict:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    merged = dict(defaults)
    for key, value in raw.items():
        if key not in defaults:
            raise ConfigError(f"{name}.{key}: unknown key")
        merged[key] = value
    for key, value in merged.items():
        path = f"{name}.{key}"
        if key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise ConfigError(f"{path}: expected true/false")
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"{path}: expected a string")
        elif key == "zone_positions_cm":
            if not (isinstance(value, list) and len(value) == 4
                    and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
                raise ConfigError(f"{path}: expected a list of four numbers")
        elif key in _INT_KEYS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{path}: expected an integer")
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{path}: expected a number")
    return merged


def config_from_dict(data: dict) -> RunConfig:
    """Build and validate a RunConfig from a parsed configuration mapping."""
    if not isinstance(data, dict):
        raise ConfigError("top level: expected an object")
    known = {"species", "beamline", "laser", "velocity", "grid", "detuning", "flags", "sweep"}
    for key in data:
        if key not in known:
            raise ConfigError(f"{key}: unknown section")

    sp = _section(data, "species", DEFAULT_CONFIG["species"])
    bl = _section(data, "beamline", DEFAULT_CONFIG["beamline"])
    ls = _section(data, "laser", DEFAULT_CONFIG["laser"])
    ve = _section(data, "velocity", DEFAULT_CONFIG["velocity"])
    gr = _section(data, "grid", DEFAULT_CONFIG["grid"])
    de = _section(data, "detuning", DEFAULT_CONFIG["detuning"])
    fl = _section(data, "flags", DEFAULT_CONFIG["flags"])

    def err(path, exc):
        raise ConfigError(f"{path}: {exc}") from exc

    try:
        species = derive_species(
            wavelength=sp["wavelength_nm"] * 1e-9,
            mass=sp["mass_amu"] * CONSTANTS.amu,
            decay_rate=2.0 * math.pi * sp["linewidth_hz"],
        )
    except ValueError as exc:
        err("species", exc)
    try:
        beamline = BeamlineGeometry(
            zone_positions=tuple(x * 1e-2 for x in bl["zone_positions_cm"]),
            ramsey_separation=bl["ramsey_separation_cm"] * 1e-2,
        )
    except ValueError as exc:
        err("beamline", exc)
    try:
        laser = LaserGeometry(
            waist_position=ls["waist_position_cm"] * 1e-2,
            waist_radius=ls["waist_radius_mm"] * 1e-3,
            target_pulse_area=ls["target_pulse_area_pi"] * math.pi,
            wavevector=species.wavevector,
            plane_wave=ls["plane_wave"],
            include_chirp=ls["include_chirp"],
            include_gouy=ls["include_gouy"],
        )
    except ValueError as exc:
        err("laser", exc)
    try:
        velocity = VelocityDistribution(
            exponent=ve["boltzmann_exponent"],
            temperature=ve["temperature_k"],
            transverse_width_base=ve["transverse_width_base_m_per_s"],
            tilt=ve["tilt_mrad"] * 1e-3,
            mean_speed=ve["mean_speed_m_per_s"],
            mass=species.mass,
            transverse_profile=ve["transverse_profile"],
        )
    except ValueError as exc:
        err("velocity", exc)
    try:
        grid = GridSpec(
            n_speed=gr["n_speed"],
            n_transverse=gr["n_transverse"],
            speed_min=gr["speed_min_m_per_s"],
            speed_max=gr["speed_max_m_per_s"],
        )
    except ValueError as exc:
        err("grid", exc)

    if de["num"] < 1:
        raise ConfigError("detuning.num: must be >= 1")
    if de["max_khz"] < de["min_khz"]:
        raise ConfigError("detuning.max_khz: must be >= min_khz")
    lo = 2.0 * math.pi * de["min_khz"] * 1e3
    hi = 2.0 * math.pi * de["max_khz"] * 1e3
    base = species.recoil_shift if de["relative_to_recoil"] else 0.0
    grid_vals = base + np.linspace(lo, hi, de["num"])

    flags = Flags(
        relativistic_doppler=fl["relativistic_doppler"],
        decay=fl["decay"],
        amplitude_decay=fl["amplitude_decay"],
    )

    sweep = None
    if "sweep" in data:
        sw = _section(
            data, "sweep",
            {"parameter": "waist_position", "min_cm": -10.0, "max_cm": 90.0,
             "min_mm": 0.05, "max_mm": 0.6, "num": 101, "with_stability": False},
        )
        try:
            if sw["parameter"] == "waist_position":
                sweep = SweepSpec("waist_position", sw["min_cm"] * 1e-2, sw["max_cm"] * 1e-2,
                                  sw["num"], sw["with_stability"])
            else:
                sweep = SweepSpec("waist_radius", sw["min_mm"] * 1e-3, sw["max_mm"] * 1e-3,
                                  sw["num"], sw["with_stability"])
        except ValueError as exc:
            err("sweep", exc)

    try:
        return RunConfig(
            species=species, beamline=beamline, laser=laser, velocity=velocity,
            detuning_grid=tuple(float(x) for x in grid_vals),
            flags=flags, grid=grid, sweep=sweep,
            detuning_spec=(float(de["min_khz"]), float(de["max_khz"]),
                           int(de["num"]), bool(de["relative_to_recoil"])),
        )
    except ValueError as exc:
        err("config", exc)


def load_config(text: str) -> RunConfig:
    """Parse a JSON configuration document; unspecified fields take defaults."""
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except ConfigError:
        raise
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse failure: {exc}") from exc
    return config_from_dict(data)


def _detuning_section(cfg: RunConfig) -> dict:
    if cfg.detuning_spec is not None:
        lo_khz, hi_khz, num, rel = cfg.detuning_spec
    else:
        # Hand-built config: describe the grid relative to the recoil shift.
        grid = cfg.detunings()
        base = cfg.species.recoil_shift
        lo_khz = (grid[0] - base) / (2.0 * math.pi * 1e3)
        hi_khz = (grid[-1] - base) / (2.0 * math.pi * 1e3)
        num, rel = int(grid.size), True
    return {
        "min_khz": lo_khz,
        "max_khz": hi_khz,
        "num": num,
        "relative_to_recoil": rel,
    }


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON text such that load_config(serialize_config(c)) == c.

    The detuning grid is stored as its (min, max, num) description; grids not
    produced by load_config may not round-trip exactly and are re-linspaced.
    """
    out = {
        "species": {
            "wavelength_nm": cfg.species.wavelength / 1e-9,
            "mass_amu": cfg.species.mass / CONSTANTS.amu,
            "linewidth_hz": cfg.species.decay_rate / (2.0 * math.pi),
        },
        "beamline": {
            "zone_positions_cm": [x / 1e-2 for x in cfg.beamline.zone_positions],
            "ramsey_separation_cm": cfg.beamline.ramsey_separation / 1e-2,
        },
        "laser": {
            "waist_position_cm": cfg.laser.waist_position / 1e-2,
            "waist_radius_mm": cfg.laser.waist_radius / 1e-3,
            "target_pulse_area_pi": cfg.laser.target_pulse_area / math.pi,
            "plane_wave": cfg.laser.plane_wave,
            "include_chirp": cfg.laser.include_chirp,
            "include_gouy": cfg.laser.include_gouy,
        },
        "velocity": {
            "boltzmann_exponent": cfg.velocity.exponent,
            "temperature_k": cfg.velocity.temperature,
            "transverse_width_base_m_per_s": cfg.velocity.transverse_width_base,
            "tilt_mrad": cfg.velocity.tilt / 1e-3,
            "mean_speed_m_per_s": cfg.velocity.mean_speed,
            "transverse_profile": cfg.velocity.transverse_profile,
        },
        "grid": {
            "n_speed": cfg.grid.n_speed,
            "n_transverse": cfg.grid.n_transverse,
            "speed_min_m_per_s": cfg.grid.speed_min,
            "speed_max_m_per_s": cfg.grid.speed_max,
        },
        "detuning": _detuning_section(cfg),
        "flags": dataclasses.asdict(cfg.flags),
    }
    if cfg.sweep is not None:
        if cfg.sweep.parameter == "waist_position":
            out["sweep"] = {
                "parameter": "waist_position",
                "min_cm": cfg.sweep.start / 1e-2,
                "max_cm": cfg.sweep.stop / 1e-2,
                "num": cfg.sweep.num,
                "with_stability": cfg.sweep.with_stability,
            }
        else:
            out["sweep"] = {
                "parameter": "waist_radius",
                "min_mm": cfg.sweep.start / 1e-3,
                "max_mm": cfg.sweep.stop / 1e-3,
                "num": cfg.sweep.num,
                "with_stability": cfg.sweep.with_stability,
            }
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def default_config() -> RunConfig:
    return config_from_dict({})
