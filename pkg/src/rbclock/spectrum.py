"""Velocity-averaged interferometer spectra P = b (1 + c).

The observable is the combined lower plus upper recoil signal averaged over
the longitudinal and transverse velocity grids.  Background and fringe parts
are accumulated separately, so b, the contrast c and the complex fringe
amplitudes per branch come out of one pass and P = b (1 + c) holds pointwise
by construction.

Evaluation is vectorised over (speed, transverse velocity, detuning) and
chunked along the detuning axis.  Chunks may be evaluated by a thread pool,
but every reduction runs in fixed node order inside plain numpy sums, so the
output bytes are independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import CONSTANTS, RunConfig
from .interferometer import (
    LOWER,
    UPPER,
    branch_detunings,
    dressed_background,
    dressed_envelope,
    make_trajectory,
    ramsey_parts,
    rb_probabilities,
    fringe_phase,
)
from .laser import effective_pulse, pulse_area_and_phase
from .velocity import QuadratureGrid, build_grid

__all__ = ["RBSpectrum", "averaged_spectrum", "single_trajectory_signal", "map_ordered"]

_CHUNK = 32  # detunings per block; fixed so results never depend on threading


@dataclass(frozen=True)
class RBSpectrum:
    """Averaged signal on a detuning grid.

    fringe_lower/upper are the complex velocity averages
    -<a- a-' e^{i theta}>/2 per branch (decay factors included); their real
    parts sum to b*c and their moduli are the fringe envelopes.
    """

    detunings: np.ndarray       # rad/s
    background: np.ndarray      # b
    contrast: np.ndarray        # c
    signal: np.ndarray          # P = b (1 + c)
    fringe_lower: np.ndarray    # complex Z_L
    fringe_upper: np.ndarray    # complex Z_U

    def envelope_lower(self) -> np.ndarray:
        env = np.abs(self.fringe_lower)
        return np.divide(env, self.background, out=np.zeros_like(env),
                         where=self.background > 0)

    def envelope_upper(self) -> np.ndarray:
        env = np.abs(self.fringe_upper)
        return np.divide(env, self.background, out=np.zeros_like(env),
                         where=self.background > 0)


def map_ordered(fn, items, threads: int = 1):
    """Apply fn to items, optionally in a thread pool; results in item order."""
    items = list(items)
    if threads is None or threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    import os

    workers = os.cpu_count() or 1 if threads == 0 else threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _grid_for(config: RunConfig) -> QuadratureGrid:
    return build_grid(
        config.velocity,
        n_speed=config.grid.n_speed,
        n_transverse=config.grid.n_transverse,
        speed_range=(config.grid.speed_min, config.grid.speed_max),
    )


def _chunk_sums(config: RunConfig, grid: QuadratureGrid, deltas: np.ndarray):
    """(b, Z_L, Z_U) of one detuning block, reduced over the velocity grid."""
    species = config.species
    laser = config.laser
    beamline = config.beamline
    gamma = config.gamma
    amp = config.flags.amplitude_decay
    v_m = config.velocity.mean_speed

    v = grid.speeds[:, None, None]
    vz = grid.transverse[:, :, None]
    weights = (grid.speed_weights[:, None] * grid.transverse_weights)[:, :, None]

    d = deltas[None, None, :]
    if config.flags.relativistic_doppler:
        gl = 1.0 / np.sqrt(1.0 - (v / CONSTANTS.c_light) ** 2)
        d = gl * (species.clock_frequency + d) - species.clock_frequency

    t1 = beamline.ramsey_separation / v
    zones = [l - laser.waist_position for l in beamline.zone_positions]

    b_sum = np.zeros(deltas.size)
    z_out = {}
    for branch in (LOWER, UPPER):
        z1, z2 = branch_detunings(d, vz, branch, species)
        phis, psis = [], []
        for i, z in enumerate(zones):
            zeta = z1 if i < 2 else z2
            phi, psi = pulse_area_and_phase(laser, z, v, v_m, zeta)
            phis.append(phi)
            psis.append(psi)
        pair1 = ramsey_parts(phis[0], phis[1])
        pair2 = ramsey_parts(phis[2], phis[3])
        ap1 = dressed_background(pair1, gamma, t1)
        ap2 = dressed_background(pair2, gamma, t1)
        am1 = dressed_envelope(pair1, gamma, t1, amp)
        am2 = dressed_envelope(pair2, gamma, t1, amp)
        theta = z1 * t1 + z2 * t1 + psis[0] - psis[1] + psis[2] - psis[3]
        if branch == LOWER:
            bg = ap2 * (1.0 - ap1)
            fringe = -0.5 * am1 * am2 * np.exp(1j * theta)
        else:
            transit = np.exp(-gamma * t1)
            bg = transit * ap1 * (1.0 - ap2)
            fringe = -0.5 * transit * am1 * am2 * np.exp(1j * theta)
        b_sum = b_sum + np.sum(weights * bg, axis=(0, 1))
        z_out[branch] = np.sum(weights * fringe, axis=(0, 1))
    return b_sum, z_out[LOWER], z_out[UPPER]


def averaged_spectrum(
    config: RunConfig, detunings: np.ndarray | None = None, threads: int = 1
) -> RBSpectrum:
    """Average the branch signals over the configured velocity grid."""
    deltas = config.detunings() if detunings is None else np.asarray(detunings, dtype=float)
    grid = _grid_for(config)
    blocks = [deltas[s : s + _CHUNK] for s in range(0, deltas.size, _CHUNK)]
    parts = map_ordered(lambda blk: _chunk_sums(config, grid, blk), blocks, threads)
    b = np.concatenate([p[0] for p in parts])
    z_l = np.concatenate([p[1] for p in parts])
    z_u = np.concatenate([p[2] for p in parts])
    fringe = z_l.real + z_u.real
    contrast = np.divide(fringe, b, out=np.zeros_like(fringe), where=b > 0)
    return RBSpectrum(
        detunings=deltas,
        background=b,
        contrast=contrast,
        signal=b * (1.0 + contrast),
        fringe_lower=z_l,
        fringe_upper=z_u,
    )


def single_trajectory_signal(config: RunConfig, v: float, v_z: float, delta: float) -> float:
    """p_L + p_U of one trajectory via the scalar composition path.

    Independent route used to pin the averaging kernel: a collapsed grid must
    reproduce this value exactly.
    """
    species = config.species
    traj = make_trajectory(config.beamline, v, v_z)
    v_m = config.velocity.mean_speed
    if config.flags.relativistic_doppler:
        from .interferometer import relativistic_detuning

        delta = float(relativistic_detuning(delta, v, species))
    zones = [l - config.laser.waist_position for l in config.beamline.zone_positions]

    def pair_parts(branch):
        z1, z2 = branch_detunings(delta, v_z, branch, species)
        pulses = [
            effective_pulse(config.laser, z, v, v_m, z1 if i < 2 else z2, zone_index=i + 1)
            for i, z in enumerate(zones)
        ]
        parts1 = ramsey_parts(pulses[0].half_area, pulses[1].half_area)
        parts2 = ramsey_parts(pulses[2].half_area, pulses[3].half_area)
        theta = fringe_phase(branch, delta, traj, species, [p.phase for p in pulses])
        return (parts1, parts2), theta

    parts_l, theta_l = pair_parts(LOWER)
    parts_u, theta_u = pair_parts(UPPER)
    comp = rb_probabilities(
        parts_l, parts_u, theta_l, theta_u,
        gamma=config.gamma, t=traj.ramsey_time, t2=traj.t2,
        amplitude_decay=config.flags.amplitude_decay,
    )
    return comp.p_lower + comp.p_upper
