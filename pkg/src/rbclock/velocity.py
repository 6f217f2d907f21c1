"""Thermal beam velocity distributions and quadrature grids.

The longitudinal speed density is the Boltzmann form
rho_v ~ v^n exp(-m v^2 / (2 kB T)) with n in {2, 3}.  The transverse
(axial, along the laser) velocity density is Gaussian around
v0 = v sin(alpha) with width v_w = (v / v_mean) * v_w_base:
aperture-collimated beams have an angular, not velocity, acceptance.  A
uniform transverse profile over the same +-3 v_w span is available for
Doppler-limit studies.

Averages use equally spaced nodes with trapezoid weights times the density,
normalised per dimension, so reductions are reproducible term by term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["VelocityDistribution", "QuadratureGrid", "build_grid"]

_BOLTZMANN = 1.380649e-23  # J/K (CODATA, fixed)


@dataclass(frozen=True)
class VelocityDistribution:
    """Longitudinal Boltzmann-type density and transverse Gaussian density.

    ``mean_speed`` is the normalisation speed v_m: the laser drive is
    calibrated so an atom at v_m through the waist receives the target pulse
    area, and the transverse width scales as v / v_m.  It is configured, not
    derived; the grid-weighted mean of the literal density is exposed by
    QuadratureGrid.mean_speed for comparison.
    """

    exponent: int                  # 2 or 3
    temperature: float             # K
    transverse_width_base: float   # m/s at v = mean_speed
    tilt: float                    # rad, beam misalignment alpha
    mean_speed: float              # m/s, v_m
    mass: float                    # kg
    transverse_profile: str = "gaussian"

    def __post_init__(self):
        if self.exponent not in (2, 3):
            raise ValueError(f"exponent must be 2 or 3, got {self.exponent}")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")
        if self.transverse_width_base <= 0:
            raise ValueError("transverse_width_base must be > 0")
        if self.mean_speed <= 0:
            raise ValueError("mean_speed must be > 0")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if self.transverse_profile not in ("gaussian", "uniform"):
            raise ValueError(f"transverse_profile must be gaussian or uniform, "
                             f"got {self.transverse_profile!r}")

    def longitudinal_density(self, v):
        v = np.asarray(v, dtype=float)
        return v**self.exponent * np.exp(
            -self.mass * v**2 / (2.0 * _BOLTZMANN * self.temperature)
        )

    def transverse_center(self, v):
        """v0(v) = v sin(alpha)."""
        return np.asarray(v, dtype=float) * np.sin(self.tilt)

    def transverse_width(self, v):
        """v_w(v) = (v / v_m) * v_w_base."""
        return np.asarray(v, dtype=float) / self.mean_speed * self.transverse_width_base


@dataclass(frozen=True)
class QuadratureGrid:
    """Speed nodes/weights and per-speed transverse nodes/weights.

    Weights are nonnegative and sum to one along each dimension (the
    transverse weights row by row).
    """

    speeds: np.ndarray            # [n_speed]
    speed_weights: np.ndarray     # [n_speed]
    transverse: np.ndarray        # [n_speed, n_transverse]
    transverse_weights: np.ndarray  # [n_speed, n_transverse]
    speed_range: tuple[float, float]

    @property
    def n_speed(self) -> int:
        return self.speeds.size

    @property
    def n_transverse(self) -> int:
        return self.transverse.shape[1]

    @property
    def mean_speed(self) -> float:
        """Weighted mean of the longitudinal grid (m/s)."""
        return float(np.sum(self.speed_weights * self.speeds))


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    if n > 1:
        w[0] = w[-1] = 0.5
    return w


def build_grid(
    dist: VelocityDistribution,
    n_speed: int = 400,
    n_transverse: int = 40,
    speed_range: tuple[float, float] = (100.0, 2200.0),
) -> QuadratureGrid:
    """Equally spaced nodes, trapezoid-times-density weights, normalised.

    The transverse grid spans +-3 v_w(v) around v0(v) for every speed node.
    A collapsed speed range with one node is the single-trajectory limit.
    """
    lo, hi = speed_range
    if not (hi >= lo > 0):
        raise ValueError(f"invalid speed range {speed_range}")
    if n_speed < 1 or n_transverse < 1:
        raise ValueError("node counts must be >= 1")
    if n_speed == 1:
        speeds = np.array([0.5 * (lo + hi)])
        speed_weights = np.array([1.0])
    else:
        if hi == lo:
            raise ValueError("speed range must not collapse when n_speed > 1")
        speeds = np.linspace(lo, hi, n_speed)
        speed_weights = _trapezoid_weights(n_speed) * dist.longitudinal_density(speeds)
        total = speed_weights.sum()
        if total <= 0:
            raise ValueError("longitudinal density vanishes on the grid")
        speed_weights = speed_weights / total

    v0 = dist.transverse_center(speeds)
    vw = dist.transverse_width(speeds)
    if n_transverse == 1:
        vz = v0[:, None]
        vz_weights = np.ones((n_speed, 1))
    else:
        offsets = np.linspace(-3.0, 3.0, n_transverse)
        vz = v0[:, None] + vw[:, None] * offsets[None, :]
        base = _trapezoid_weights(n_transverse)[None, :]
        if dist.transverse_profile == "gaussian":
            density = np.exp(-((vz - v0[:, None]) / vw[:, None]) ** 2)
        else:
            density = np.ones_like(vz)
        vz_weights = base * density
        vz_weights = vz_weights / vz_weights.sum(axis=1, keepdims=True)

    return QuadratureGrid(
        speeds=speeds,
        speed_weights=speed_weights,
        transverse=vz,
        transverse_weights=vz_weights,
        speed_range=(float(lo), float(hi)),
    )
