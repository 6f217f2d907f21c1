"""Waist-geometry sweeps and 1-D refinement of the Fisher information.

Per sweep node the fringe window is evaluated once: brightness and contrast
come from the resonance point, T_f and the fringe shift from the phase fit,
and the Fisher information from the resonance estimate T_f^2 b0 c0^2/(1+c0)
(the same measure whose ideal value is T_f^2/40).  The Fisher argmax is then
refined inside the best bracket by golden-section search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    DegenerateFitError,
    brightness_contrast,
    fisher_resonance_estimate,
    fit_spectrum_shift,
    fit_window,
    stability,
    with_laser,
)
from .config import RunConfig
from .spectrum import averaged_spectrum, map_ordered

__all__ = ["SweepResult", "sweep_waist_position", "sweep_waist_size", "golden_section_max"]

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepResult:
    """Metrics on a strictly increasing parameter grid plus argmax records."""

    parameter: str                        # "waist_position" | "waist_radius"
    values: np.ndarray                    # m
    metrics: dict[str, np.ndarray]        # per-node columns
    argmax: dict[str, tuple[float, float]] = field(default_factory=dict)
    refined_fisher: tuple[float, float] | None = None  # (value m, F)

    def best(self, metric: str) -> tuple[float, float]:
        return self.argmax[metric]


def golden_section_max(fn, lo: float, hi: float, tol: float):
    """Golden-section maximiser of a unimodal scalar function on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    return ((a + b) / 2.0, max(fc, fd))


def _node_metrics(config: RunConfig, fit_points: int, with_stability: bool,
                  stability_step: float):
    """Evaluate one geometry: (b0, c0, T_f, F, F/F0, shift, s_per_um)."""
    window = fit_window(config, num=fit_points)
    spec = averaged_spectrum(config, detunings=window)
    b0, c0 = brightness_contrast(spec, config.species)
    try:
        fit = fit_spectrum_shift(spec, config.species)
        t_f, shift = fit.slope_time, fit.shift
        f_est = fisher_resonance_estimate(b0, c0, t_f)
        f_over_f0 = f_est / (t_f**2 / 40.0)
    except DegenerateFitError:
        t_f = shift = f_est = f_over_f0 = float("nan")
    s_per_um = float("nan")
    if with_stability and np.isfinite(shift):
        res = stability(config, config.laser.waist_position, step=stability_step,
                        num=fit_points)
        s_per_um = res.s_per_um
    return b0, c0, t_f, f_est, f_over_f0, shift, s_per_um


def _sweep(config: RunConfig, parameter: str, values: np.ndarray, fit_points: int,
           threads: int, with_stability: bool, stability_step: float,
           refine_tol: float) -> SweepResult:
    values = np.asarray(values, dtype=float)
    if values.size < 1:
        raise ValueError("sweep needs at least one node")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ValueError("sweep values must be strictly increasing")

    def at(x: float) -> RunConfig:
        return with_laser(config, **{parameter: float(x)})

    rows = map_ordered(
        lambda x: _node_metrics(at(x), fit_points, with_stability, stability_step),
        values, threads,
    )
    cols = np.array(rows, dtype=float).T
    metrics = {
        "brightness": cols[0],
        "contrast": cols[1],
        "slope_time": cols[2],
        "fisher": cols[3],
        "fisher_over_f0": cols[4],
        "shift": cols[5],
        "stability_per_um": cols[6],
    }
    argmax = {}
    for name in ("brightness", "contrast", "fisher"):
        col = metrics[name]
        finite = np.where(np.isfinite(col), col, -np.inf)
        i = int(np.argmax(finite))
        argmax[name] = (float(values[i]), float(col[i]))

    refined = None
    if values.size >= 3:
        col = metrics["fisher"]
        finite = np.where(np.isfinite(col), col, -np.inf)
        i = int(np.argmax(finite))
        lo = values[max(i - 1, 0)]
        hi = values[min(i + 1, values.size - 1)]
        if hi > lo:
            x, f = golden_section_max(
                lambda p: _node_metrics(at(p), fit_points, False, stability_step)[3],
                lo, hi, refine_tol,
            )
            # never report a refinement below the best grid node
            if np.isfinite(f) and f >= finite[i]:
                refined = (float(x), float(f))
            else:
                refined = (float(values[i]), float(col[i]))
    return SweepResult(parameter=parameter, values=values, metrics=metrics,
                       argmax=argmax, refined_fisher=refined)


def sweep_waist_position(config: RunConfig, lo: float = -0.10, hi: float = 0.90,
                         num: int = 101, fit_points: int = 41, threads: int = 1,
                         with_stability: bool = False, stability_step: float = 5e-4,
                         refine_tol: float = 1e-4) -> SweepResult:
    """Metrics versus waist position over [lo, hi] metres."""
    values = np.linspace(lo, hi, num) if num > 1 else np.array([0.5 * (lo + hi)])
    return _sweep(config, "waist_position", values, fit_points, threads,
                  with_stability, stability_step, refine_tol)


def sweep_waist_size(config: RunConfig, lo: float = 0.05e-3, hi: float = 0.60e-3,
                     num: int = 56, fit_points: int = 41, threads: int = 1,
                     refine_tol: float = 1e-6) -> SweepResult:
    """Metrics versus waist radius over [lo, hi] metres at fixed position."""
    values = np.linspace(lo, hi, num) if num > 1 else np.array([0.5 * (lo + hi)])
    return _sweep(config, "waist_radius", values, fit_points, threads,
                  False, 5e-4, refine_tol)
