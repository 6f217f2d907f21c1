"""Four-zone interferometer composition for a single atom trajectory.

Two co-propagating crossings (zones 1, 2) form the first Ramsey pair, two
counter-propagating crossings (zones 3, 4) the second.  The detected signal
splits into lower and upper recoil branches whose effective detunings differ
by the recoil bookkeeping; only the Doppler-free fringe mode is retained.

Decay follows the population-level convention: the excited-path background
weight and the fringe envelope of each pair pick up exp(-gamma T), and the
upper-recoil signal is detected after an excited transit of the second pair,
an overall exp(-gamma T').  An amplitude-level variant with exp(-gamma T/2)
on the envelopes sits behind ``amplitude_decay`` for sensitivity studies.

All functions accept numpy arrays for the detuning-dependent arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LOWER",
    "UPPER",
    "Trajectory",
    "RamseyParts",
    "RBComponents",
    "make_trajectory",
    "branch_detunings",
    "effective_detunings",
    "relativistic_detuning",
    "ramsey_parts",
    "dressed_background",
    "dressed_envelope",
    "fringe_phase",
    "fringe_phase_terms",
    "gouy_sum",
    "rb_probabilities",
]

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class Trajectory:
    """One atom: longitudinal speed, axial velocity, Ramsey times."""

    v: float                      # m/s, > 0
    v_z: float                    # m/s along the laser axis
    ramsey_time: float            # T = d_r / v (s)
    ramsey_time_2: float | None = None  # T' for the second pair; defaults to T

    def __post_init__(self):
        if self.v <= 0:
            raise ValueError("v must be > 0")
        if self.ramsey_time <= 0:
            raise ValueError("ramsey_time must be > 0")

    @property
    def t2(self) -> float:
        return self.ramsey_time if self.ramsey_time_2 is None else self.ramsey_time_2


def make_trajectory(beamline, v: float, v_z: float) -> Trajectory:
    """Trajectory with T = T' = d_r / v for the given beamline."""
    return Trajectory(v=v, v_z=v_z, ramsey_time=beamline.ramsey_separation / v)


@dataclass(frozen=True)
class RamseyParts:
    """Backgrounds and fringe envelope of one Ramsey pair (no decay applied).

    a_g: pair traversed in the ground state between crossings;
    a_e: pair traversed in the excited state;
    a_minus: signed fringe envelope.  a_g + a_e equals
    (sin^2(P1+P2) + sin^2(P1-P2)) / 2 and |a_minus| <= a_g + a_e.
    """

    a_g: float
    a_e: float
    a_minus: float

    @property
    def a_plus(self) -> float:
        return self.a_g + self.a_e


@dataclass(frozen=True)
class RBComponents:
    """Lower/upper recoil signals with background and fringe terms kept apart."""

    p_lower: float
    p_upper: float
    background_lower: float   # a+' (1 - a+) at lower detunings
    background_upper: float   # e^{-gamma T'} a+ (1 - a+') at upper detunings
    fringe_lower: float       # -a- a-' cos(theta_L) / 2
    fringe_upper: float       # -e^{-gamma T'} a- a-' cos(theta_U) / 2


def branch_detunings(delta, v_z, branch: str, species):
    """Array-compatible effective detunings (zeta_1, zeta_2) for one branch.

    Lower branch: (delta - d) +- v_z k around the lower recoil resonance.
    Upper branch: (delta + d) +- (2 d + v_z k); the recoil Doppler offset
    2 d cancels from the fringe phase but detunes both pulses.
    """
    d = species.recoil_shift
    k = species.wavevector
    if branch == LOWER:
        common = delta - d
        shift = v_z * k
    elif branch == UPPER:
        common = delta + d
        shift = 2.0 * d + v_z * k
    else:
        raise ValueError(f"branch must be {LOWER!r} or {UPPER!r}, got {branch!r}")
    return common + shift, common - shift


def effective_detunings(delta, traj: Trajectory, branch: str, species):
    """Effective detunings of the two pairs for one atom and recoil branch."""
    return branch_detunings(delta, traj.v_z, branch, species)


def relativistic_detuning(delta, v, species, enabled: bool = True):
    """delta -> gamma_L (omega_c + delta) - omega_c, gamma_L = 1/sqrt(1-v^2/c^2)."""
    if not enabled:
        return delta
    from .config import CONSTANTS  # local import to avoid a cycle

    c = CONSTANTS.c_light
    v = np.asarray(v, dtype=float)
    if np.any(v >= c):
        raise ValueError("v must be below the speed of light")
    gamma_l = 1.0 / np.sqrt(1.0 - (v / c) ** 2)
    return gamma_l * (species.clock_frequency + delta) - species.clock_frequency


def ramsey_parts(phi1, phi2):
    """Ramsey pair parts from the half pulse areas of its two crossings."""
    a_g = np.cos(phi1) ** 2 * np.sin(phi2) ** 2
    a_e = np.sin(phi1) ** 2 * np.cos(phi2) ** 2
    a_minus = 0.5 * (np.sin(phi1 + phi2) ** 2 - np.sin(phi1 - phi2) ** 2)
    if np.isscalar(phi1) and np.isscalar(phi2):
        return RamseyParts(a_g=float(a_g), a_e=float(a_e), a_minus=float(a_minus))
    return RamseyParts(a_g=a_g, a_e=a_e, a_minus=a_minus)


def dressed_background(parts: RamseyParts, gamma: float, t: float):
    """a+ with the excited path decayed: a_g + e^{-gamma t} a_e."""
    return parts.a_g + np.exp(-gamma * t) * parts.a_e


def dressed_envelope(parts: RamseyParts, gamma: float, t: float, amplitude_decay: bool = False):
    """Fringe envelope with decay; exp(-gamma t / 2) in the amplitude variant."""
    scale = 0.5 if amplitude_decay else 1.0
    return np.exp(-scale * gamma * t) * parts.a_minus


def fringe_phase(branch: str, delta, traj: Trajectory, species, psis):
    """Total Doppler-free fringe phase for one branch.

    theta = zeta_1 T + zeta_2 T' + (psi_1 - psi_2 + psi_3 - psi_4), where the
    psis are the laser phases at THIS trajectory's effective detunings.  With
    T = T' the Doppler terms cancel and the leading part is 2 T (delta -+ d);
    with T != T' a residual (T - T') v_z k survives.
    """
    z1, z2 = effective_detunings(delta, traj, branch, species)
    p1, p2, p3, p4 = psis
    return z1 * traj.ramsey_time + z2 * traj.t2 + p1 - p2 + p3 - p4


def gouy_sum(beamline, waist_position: float, rayleigh_range: float) -> float:
    """g_s = sum_i +- arctan((l_i - l_w)/z_R), signed (+,-,+,-)."""
    signs = (1.0, -1.0, 1.0, -1.0)
    return float(
        sum(
            s * np.arctan((l - waist_position) / rayleigh_range)
            for s, l in zip(signs, beamline.zone_positions)
        )
    )


@dataclass(frozen=True)
class FringePhaseTerms:
    """Diagnostic decomposition of the near-resonance fringe phase.

    time_of_flight_factor multiplies 2 T (delta -+ d); the spatial term
    carries the sign of the implemented laser-phase convention, opposite to
    a +k l_s convention (the two differ only by the undetermined sign of the
    folded-path sum).
    """

    time_of_flight_factor: float   # 1 + (l_s/d_r)(v_z/v)
    spatial: float                 # -k l_s (1 - v_z^2 / (2 v^2))
    gouy: float                    # g_s / 2


def fringe_phase_terms(traj: Trajectory, species, beamline, laser) -> FringePhaseTerms:
    ls = beamline.path_sum
    k = species.wavevector
    ratio = traj.v_z / traj.v
    return FringePhaseTerms(
        time_of_flight_factor=1.0 + (ls / beamline.ramsey_separation) * ratio,
        spatial=-k * ls * (1.0 - 0.5 * ratio**2),
        gouy=0.5 * gouy_sum(beamline, laser.waist_position, laser.rayleigh_range),
    )


def rb_probabilities(
    parts_lower: tuple[RamseyParts, RamseyParts],
    parts_upper: tuple[RamseyParts, RamseyParts],
    theta_lower,
    theta_upper,
    gamma: float,
    t: float,
    t2: float | None = None,
    amplitude_decay: bool = False,
) -> RBComponents:
    """Compose branch signals from pair parts evaluated at branch detunings.

    The two branches see different effective detunings, so each needs its own
    pair parts.  p_L = a+'(1 - a+) - a- a-' cos(theta_L)/2 and p_U carries the
    extra excited-transit factor e^{-gamma T'} on both of its terms.
    """
    t2 = t if t2 is None else t2

    def pair(parts1, parts2):
        ap1 = dressed_background(parts1, gamma, t)
        ap2 = dressed_background(parts2, gamma, t2)
        am1 = dressed_envelope(parts1, gamma, t, amplitude_decay)
        am2 = dressed_envelope(parts2, gamma, t2, amplitude_decay)
        return ap1, ap2, am1, am2

    ap1, ap2, am1, am2 = pair(*parts_lower)
    bg_l = ap2 * (1.0 - ap1)
    fr_l = -0.5 * am1 * am2 * np.cos(theta_lower)

    ap1u, ap2u, am1u, am2u = pair(*parts_upper)
    transit = np.exp(-gamma * t2)
    bg_u = transit * ap1u * (1.0 - ap2u)
    fr_u = -0.5 * transit * am1u * am2u * np.cos(theta_upper)

    return RBComponents(
        p_lower=bg_l + fr_l,
        p_upper=bg_u + fr_u,
        background_lower=bg_l,
        background_upper=bg_u,
        fringe_lower=fr_l,
        fringe_upper=fr_u,
    )
