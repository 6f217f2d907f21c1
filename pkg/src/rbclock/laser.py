"""Gaussian beam optics and the effective pulse seen by a transiting atom.

The interrogation laser is a single focused TEM00 beam folded to cross the
atomic beam four times.  An atom crossing the optical axis a distance ``z``
from the waist sees a pulsed field whose envelope, chirp and Gouy phase are
set by the local beam parameters.  The first-order (Magnus) effective pulse
is the Fourier transform of that field at the effective detuning: a half
pulse area ``Phi`` and a laser phase ``psi``.

All quantities are SI; angles and phases in radians, angular frequencies in
rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LaserGeometry",
    "BeamFrame",
    "ZonePulse",
    "beam_frame",
    "field_at",
    "effective_pulse",
    "pulse_area_and_phase",
]


@dataclass(frozen=True)
class LaserGeometry:
    """Interrogation laser: waist location/size, drive strength, model flags.

    Parameters
    ----------
    waist_position : float
        Position of the focus along the (folded) optical path (m).
    waist_radius : float
        1/e^2 intensity waist radius w0 (m).
    target_pulse_area : float
        Pulse area 2*Phi delivered to an atom crossing the waist at the
        reference speed (rad).
    wavevector : float
        Laser wavevector k = 2*pi/lambda (rad/m).
    plane_wave : bool
        Drop every wavefront-curvature effect (loss factor, chirp, Gouy);
        only the Gaussian transit envelope and the carrier phase remain.
    include_chirp : bool
        Keep the detuning-squared spatial phase correction (diagnostics knob).
    include_gouy : bool
        Keep the Gouy phase contribution (diagnostics knob).
    """

    waist_position: float
    waist_radius: float
    target_pulse_area: float
    wavevector: float
    plane_wave: bool = False
    include_chirp: bool = True
    include_gouy: bool = True

    def __post_init__(self):
        if self.waist_radius <= 0:
            raise ValueError(f"waist_radius must be > 0, got {self.waist_radius}")
        if self.target_pulse_area <= 0:
            raise ValueError(f"target_pulse_area must be > 0, got {self.target_pulse_area}")
        if self.wavevector <= 0:
            raise ValueError(f"wavevector must be > 0, got {self.wavevector}")

    @property
    def rayleigh_range(self) -> float:
        """z_R = k w0^2 / 2 (m)."""
        return self.wavevector * self.waist_radius**2 / 2.0


@dataclass(frozen=True)
class BeamFrame:
    """Local beam parameters a signed distance ``z`` from the waist."""

    z: float
    width: float              # w(z) = w0 sqrt(1 + z^2/zR^2)  (m)
    inverse_curvature: float  # 1/R(z) = z / (z^2 + zR^2); 0 at the waist (1/m)
    gouy: float               # arctan(z/zR)  (rad)

    @property
    def curvature_radius(self) -> float:
        """Wavefront radius of curvature R(z); infinite at the waist."""
        return math.inf if self.inverse_curvature == 0.0 else 1.0 / self.inverse_curvature


@dataclass(frozen=True)
class ZonePulse:
    """Effective half pulse area and laser phase of one atom-laser crossing.

    ``phase`` is kept unwrapped: the interferometer phase algebra differences
    large k*z terms and must not lose the integer-cycle part.
    """

    half_area: float
    phase: float
    zone_index: int = 1

    def __post_init__(self):
        if self.half_area < 0:
            raise ValueError("half_area must be >= 0")

    @property
    def wrapped_phase(self) -> float:
        """Phase reduced to (-pi, pi] for display."""
        return -((-self.phase + math.pi) % (2.0 * math.pi) - math.pi)


def beam_frame(lg: LaserGeometry, z: float) -> BeamFrame:
    """Evaluate width, curvature and Gouy phase at distance ``z`` from the waist."""
    zr = lg.rayleigh_range
    width = lg.waist_radius * math.sqrt(1.0 + (z / zr) ** 2)
    inv_r = z / (z * z + zr * zr)
    return BeamFrame(z=z, width=width, inverse_curvature=inv_r, gouy=math.atan(z / zr))


def field_at(lg: LaserGeometry, z: float, v: float, v_m: float, t: float):
    """Instantaneous drive amplitude and phase seen by a transiting atom.

    The atom crosses the optical axis at ``t = 0`` with speed ``v``
    perpendicular to the beam.  Returns ``(omega, phi)`` with the field
    ``E(t) = omega(t) * exp(i phi(t))``:

        omega(t) = v_m A / (2 sqrt(pi) w(z)) * exp(-v^2 t^2 / w(z)^2)
        phi(t)   = k z + k v^2 t^2 / (2 R(z)) - arctan(z / z_R)

    Normalised so an atom through the waist at ``v = v_m`` receives the
    target pulse area.  With ``plane_wave`` the width is frozen at w0 and
    phi(t) = k z.
    """
    if v <= 0:
        raise ValueError("v must be > 0")
    frame = beam_frame(lg, z)
    if lg.plane_wave:
        w = lg.waist_radius
        phi = lg.wavevector * z
    else:
        w = frame.width
        phi = (
            lg.wavevector * z
            + 0.5 * lg.wavevector * v * v * t * t * frame.inverse_curvature
            - frame.gouy
        )
    omega = v_m * lg.target_pulse_area / (2.0 * math.sqrt(math.pi) * w) * math.exp(
        -(v * t / w) ** 2
    )
    return omega, phi


def pulse_area_and_phase(lg: LaserGeometry, z, v, v_m, delta_eff):
    """Half pulse area Phi and laser phase psi (array-compatible core).

    Closed form of the Fourier transform of the crossing field at the
    effective detuning, written as ``integral(E(t) e^{-i delta t} dt)
    = Phi e^{-i psi}``:

        Phi = (A/2) (v_m/v) sqrt(w0/w(z)) exp(-delta^2 tau0^2 / 4)
        psi = -k z (1 - delta^2 / (2 k^2 v^2)) + arctan(z/z_R) / 2

    with the transit time ``tau0 = w0/v`` independent of z.  The sign of the
    spatial and Gouy terms follows the quadrature of the field above (the
    propagator off-diagonal is ``-i sin(Phi) e^{-i psi}``).  ``plane_wave``
    keeps only the carrier: Phi with w(z) -> w0 and psi = -k z.
    """
    zr = lg.rayleigh_range
    k = lg.wavevector
    a_half = 0.5 * lg.target_pulse_area
    tau0 = lg.waist_radius / v
    transit = np.exp(-0.25 * (delta_eff * tau0) ** 2)
    if lg.plane_wave:
        phi = a_half * (v_m / v) * transit
        psi = -k * z * np.ones_like(np.asarray(delta_eff, dtype=float))
        return phi, psi
    loss = (1.0 + (z / zr) ** 2) ** -0.25
    phi = a_half * (v_m / v) * loss * transit
    chirp = delta_eff**2 / (2.0 * k * k * v * v) if lg.include_chirp else 0.0
    psi = -k * z * (1.0 - chirp)
    if lg.include_gouy:
        psi = psi + 0.5 * np.arctan(z / zr)
    return phi, psi


def effective_pulse(
    lg: LaserGeometry, z: float, v: float, v_m: float, delta_eff: float, zone_index: int = 1
) -> ZonePulse:
    """Effective pulse of a single crossing at effective detuning ``delta_eff``."""
    if v <= 0:
        raise ValueError("v must be > 0")
    phi, psi = pulse_area_and_phase(lg, z, v, v_m, delta_eff)
    return ZonePulse(half_area=float(phi), phase=float(psi), zone_index=zone_index)
