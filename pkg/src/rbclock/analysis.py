"""Derived clock metrics: brightness, contrast, Fisher information, fringe
frequency shift, waist-position stability, and the single-zone matching
condition.

All metric extraction happens on the lower recoil branch at its resonance
(detuning equal to the recoil shift); the upper branch differs only by the
small intrinsic recoil-Doppler degradation.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .interferometer import Trajectory
from .spectrum import RBSpectrum, averaged_spectrum

__all__ = [
    "FringeFit",
    "QualityMetrics",
    "DegenerateFitError",
    "brightness_contrast",
    "ideal_brightness_contrast",
    "fisher",
    "fisher_resonance_estimate",
    "fit_window",
    "frequency_shift",
    "fit_spectrum_shift",
    "quality_metrics",
    "stability",
    "counterprop_residual",
    "matching_ratio",
    "with_laser",
]

# Phase-fit residual above this marks the linear fringe model as invalid.
MAX_FIT_RESIDUAL = 0.5  # rad rms


class DegenerateFitError(RuntimeError):
    """Fringe envelope too small for a meaningful phase fit."""


@dataclass(frozen=True)
class FringeFit:
    """Linear fit of the central-fringe phase: cos(2 T_f (delta - d - shift)).

    ``shift`` is the frequency offset of the central fringe from the lower
    recoil resonance (rad/s); ``slope_time`` is T_f, so fringes have ordinary
    period 1/(2 T_f) Hz.
    """

    shift: float          # rad/s
    slope_time: float     # s
    window: float         # rad/s half-width of the fitted region
    residual_rms: float   # rad

    @property
    def period_hz(self) -> float:
        return 1.0 / (2.0 * self.slope_time)


@dataclass(frozen=True)
class QualityMetrics:
    brightness: float          # b0
    contrast: float            # c0
    area_ratio: float          # r = <a^2>/<a> implied by c0
    fisher: float              # resonance estimate, 1/(rad/s)^2 per atom
    fisher_reference: float    # F0 = T_f^2 / 40


def quality_metrics(spectrum: RBSpectrum, species, fit: "FringeFit") -> QualityMetrics:
    """Headline signal-quality numbers at the lower recoil resonance.

    The implied pulse-area ratio r inverts c0 = r / (4 (1 - r)).
    """
    b0, c0 = brightness_contrast(spectrum, species)
    return QualityMetrics(
        brightness=b0,
        contrast=c0,
        area_ratio=4.0 * c0 / (1.0 + 4.0 * c0),
        fisher=fisher_resonance_estimate(b0, c0, fit.slope_time),
        fisher_reference=fit.slope_time**2 / 40.0,
    )


def brightness_contrast(spectrum: RBSpectrum, species) -> tuple[float, float]:
    """b0 = b at the lower recoil resonance; c0 = |Z_L|/b there.

    Linear interpolation on the stored grid; the resonance must lie inside.
    """
    d = spectrum.detunings
    target = species.recoil_shift
    if not (d[0] <= target <= d[-1]):
        raise ValueError("recoil resonance lies outside the detuning grid")
    b0 = float(np.interp(target, d, spectrum.background))
    env = np.abs(spectrum.fringe_lower)
    c0 = float(np.interp(target, d, env)) / b0
    return b0, c0


def ideal_brightness_contrast(a_values, weights) -> tuple[float, float, float]:
    """Equal-pulse-area limit: b0 = 2<a>(1-r), c0 = r/(4(1-r)), r = <a^2>/<a>."""
    a = np.asarray(a_values, dtype=float)
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    mean_a = float(np.sum(w * a))
    r = float(np.sum(w * a * a)) / mean_a
    return 2.0 * mean_a * (1.0 - r), r / (4.0 * (1.0 - r)), r


def fisher(spectrum: RBSpectrum, at_delta: float) -> float:
    """Per-atom Fisher information F = P'(delta)^2 / P(delta).

    Central finite difference with the local grid spacing; ``at_delta`` must
    be interior to the grid.
    """
    d = spectrum.detunings
    if d.size < 3:
        raise ValueError("need at least three grid points")
    i = int(np.argmin(np.abs(d - at_delta)))
    if i == 0 or i == d.size - 1:
        raise ValueError("detuning sits on the grid edge; no central difference")
    p = spectrum.signal
    dp = (p[i + 1] - p[i - 1]) / (d[i + 1] - d[i - 1])
    return float(dp * dp / p[i])


def fisher_resonance_estimate(b0: float, c0: float, slope_time: float) -> float:
    """F ~ T_f^2 b0 c0^2 / (1 + c0), the sinusoidal-fringe resonance estimate."""
    return slope_time**2 * b0 * c0**2 / (1.0 + c0)


def fit_window(config: RunConfig, num: int = 41) -> np.ndarray:
    """Detuning nodes covering half a fringe period around the resonance.

    The window half-width uses the nominal Ramsey time at the normalisation
    speed; the fitted period may come out longer (slow atoms dominate).
    """
    t_nominal = config.beamline.ramsey_separation / config.velocity.mean_speed
    half = math.pi / (2.0 * t_nominal)
    return config.species.recoil_shift + np.linspace(-half, half, num)


def _wrap(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def fit_spectrum_shift(spectrum: RBSpectrum, species) -> FringeFit:
    """Phase-only fringe fit on an already evaluated window spectrum.

    Normalises the lower fringe amplitude to unit modulus, unwraps the phase
    of -Z_L (the fringe term is -|Z| cos(theta)), and fits a line against
    (delta - recoil).  The intercept, wrapped to the nearest fringe, gives
    the central-fringe shift; half the slope is T_f.
    """
    env = np.abs(spectrum.fringe_lower)
    b0 = float(np.interp(species.recoil_shift, spectrum.detunings, spectrum.background))
    if not np.isfinite(b0) or b0 <= 0.0 or np.any(env <= 1e-6 * b0):
        raise DegenerateFitError("fringe envelope below 1e-6 of the brightness in the window")
    phases = np.unwrap(np.angle(-spectrum.fringe_lower))
    x = spectrum.detunings - species.recoil_shift
    slope, intercept = np.polyfit(x, phases, 1)
    if not (np.isfinite(slope) and slope > 0.0):
        raise DegenerateFitError("non-positive fitted fringe slope")
    residual = phases - (slope * x + intercept)
    fit = FringeFit(
        shift=-_wrap(float(intercept)) / float(slope),
        slope_time=float(slope) / 2.0,
        window=float(x[-1]),
        residual_rms=float(np.sqrt(np.mean(residual**2))),
    )
    if fit.slope_time <= 0:
        raise DegenerateFitError("non-positive fitted fringe slope")
    return fit


def frequency_shift(config: RunConfig, num: int = 41, threads: int = 1) -> FringeFit:
    """Fit the central lower recoil fringe of the configured system."""
    window = fit_window(config, num=num)
    spec = averaged_spectrum(config, detunings=window, threads=threads)
    return fit_spectrum_shift(spec, config.species)


def with_laser(config: RunConfig, **changes) -> RunConfig:
    """Copy of the config with laser-geometry fields replaced."""
    return dataclasses.replace(config, laser=dataclasses.replace(config.laser, **changes))


@dataclass(frozen=True)
class StabilityResult:
    shift: float        # rad/s at the requested waist position
    s_per_m: float      # (1/omega_c) d shift / d l_w
    s_per_um: float
    step: float         # m


def stability(config: RunConfig, waist_position: float, step: float = 5e-4,
              num: int = 41, threads: int = 1) -> StabilityResult:
    """Fractional frequency sensitivity to the waist position.

    Central finite difference of the fitted fringe shift over
    waist_position +- step, divided by the clock frequency.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    shifts = []
    for lw in (waist_position - step, waist_position, waist_position + step):
        fit = frequency_shift(with_laser(config, waist_position=lw), num=num, threads=threads)
        shifts.append(fit.shift)
    s = (shifts[2] - shifts[0]) / (2.0 * step) / config.species.clock_frequency
    return StabilityResult(shift=shifts[1], s_per_m=s, s_per_um=s * 1e-6, step=step)


def counterprop_residual(traj: Trajectory, beamline, g_s: float) -> float:
    """Residual shift after counterpropagating-beam averaging (rad/s).

    Lowest-order survivor: (g_s / T) (v_z l_s / (4 v d_r))^2; odd-order
    geometric terms cancel under l_s -> -l_s, g_s -> -g_s.
    """
    ratio = traj.v_z * beamline.path_sum / (4.0 * traj.v * beamline.ramsey_separation)
    return g_s / traj.ramsey_time * ratio**2


def matching_ratio(z: float, rayleigh_range: float) -> float:
    """Optimal laser-to-atomic divergence ratio sqrt((z_R/z)^2 - 1).

    Maximises the transverse-averaged squared pulse area of a single
    crossing a distance z from the waist; requires 0 < z <= z_R.
    """
    if not 0.0 < z <= rayleigh_range:
        raise ValueError("matching condition requires 0 < z <= rayleigh_range")
    return math.sqrt((rayleigh_range / z) ** 2 - 1.0)
