"""Command-line entry point: run studies, emit deterministic CSV + JSON.

Commands: spectrum, fringes, sweep-waist, sweep-size, fisher, shift,
stability, oracle-check.  Flags: --config PATH, --set key=value (repeatable,
dotted path into the JSON schema), --out DIR, --threads N (0 = auto; never
changes output bytes).

Every command writes <command>.csv with a '#' metadata block (schema id,
package version, config hash) and <command>_summary.json echoing the config
and the derived constants.  Frequencies cross this boundary in Hz, positions
in cm/mm.  CSV bytes are a pure function of the configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    DegenerateFitError,
    fisher_resonance_estimate,
    fit_spectrum_shift,
    fit_window,
    quality_metrics,
    stability,
)
from .config import ConfigError, RunConfig, config_from_dict, serialize_config
from .interferometer import ramsey_parts
from .laser import effective_pulse
from .optimizer import sweep_waist_position, sweep_waist_size
from .propagator import excitation_probability, trotter_unitary
from .spectrum import averaged_spectrum

COMMANDS = ("spectrum", "fringes", "sweep-waist", "sweep-size", "fisher",
            "shift", "stability", "oracle-check")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

TWO_PI = 2.0 * math.pi

# Bump when any CSV column set changes; the figure emitter checks it.
SCHEMA_VERSION = 1

# Published oracle-check table: target areas (units of pi), waist offsets
# (units of z_R) and effective detunings (units of 1/tau0); Magnus is
# compared against the n-step time-ordered reference at each point.
ORACLE_AREAS_PI = (0.1, 0.25, 0.4, 0.5)
ORACLE_Z_OVER_ZR = (0.0, 1.0, -1.0, 2.0, -2.0)
ORACLE_DETUNING_TAU = tuple(np.linspace(-2.0, 2.0, 9))
ORACLE_TROTTER_STEPS = 10
ORACLE_THRESHOLD = 1e-2


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, schema: str, config_hash: str, command: str,
               columns: list[str], rows, meta: dict | None = None) -> None:
    lines = [
        f"# schema={schema}/v{SCHEMA_VERSION}",
        f"# command={command}",
        f"# package=rbclock {__version__}",
        f"# config_sha256={config_hash}",
    ]
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _geometry_meta(cfg: RunConfig) -> dict:
    zones = ",".join(_fmt(z / 1e-2) for z in cfg.beamline.zone_positions)
    return {
        "zones_cm": zones,
        "mean_zone_cm": _fmt(cfg.beamline.mean_position / 1e-2),
        "recoil_hz": _fmt(cfg.species.recoil_shift / TWO_PI),
    }


def _summary(cfg: RunConfig, extra: dict, started: float) -> dict:
    species = cfg.species
    t_ref = cfg.beamline.ramsey_separation / cfg.velocity.mean_speed
    return {
        "config": json.loads(serialize_config(cfg)),
        "derived": {
            "recoil_shift_hz": species.recoil_shift / TWO_PI,
            "clock_frequency_rad_s": species.clock_frequency,
            "rayleigh_range_cm": cfg.laser.rayleigh_range / 1e-2,
            "ramsey_time_at_mean_speed_s": t_ref,
            "path_sum_cm": cfg.beamline.path_sum / 1e-2,
            "grid": {"n_speed": cfg.grid.n_speed, "n_transverse": cfg.grid.n_transverse,
                     "n_detuning": len(cfg.detuning_grid)},
        },
        "results": extra,
        "wall_time_s": time.monotonic() - started,
    }


def _apply_overrides(data: dict, pairs: list[str]) -> dict:
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, raw = pair.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--set {key}: {p} is not a section")
        node[parts[-1]] = value
    return data


def _spectrum_rows(cfg: RunConfig, threads: int):
    spec = averaged_spectrum(cfg, threads=threads)
    env_l = spec.envelope_lower()
    env_u = spec.envelope_upper()
    recoil = cfg.species.recoil_shift
    for i, d in enumerate(spec.detunings):
        yield (d / TWO_PI, (d - recoil) / TWO_PI, spec.background[i],
               spec.contrast[i], spec.signal[i], env_l[i], env_u[i])


def _cmd_spectrum(cfg, out, chash, threads, command):
    rows = list(_spectrum_rows(cfg, threads))
    _write_csv(out / f"{command}.csv", "spectrum", chash, command,
               ["delta_hz", "delta_rel_hz", "background", "contrast", "signal",
                "envelope_lower", "envelope_upper"], rows, meta=_geometry_meta(cfg))
    mid = len(rows) // 2
    return {"n_points": len(rows), "signal_mid": rows[mid][4]}


def _cmd_fisher(cfg, out, chash, threads, command):
    spec = averaged_spectrum(cfg, threads=threads)
    rows = []
    for i in range(1, spec.detunings.size - 1):
        d = spec.detunings
        dp = (spec.signal[i + 1] - spec.signal[i - 1]) / (d[i + 1] - d[i - 1])
        f = dp * dp / spec.signal[i]
        rows.append((d[i] / TWO_PI, spec.signal[i], dp, f))
    _write_csv(out / "fisher.csv", "fisher", chash, command,
               ["delta_hz", "signal", "dsignal_ddelta", "fisher"], rows,
               meta=_geometry_meta(cfg))
    fmax = max(r[3] for r in rows)
    return {"fisher_max": fmax}


def _cmd_shift(cfg, out, chash, threads, command):
    window = fit_window(cfg, num=339)
    spec = averaged_spectrum(cfg, detunings=window, threads=threads)
    fit = fit_spectrum_shift(spec, cfg.species)
    quality = quality_metrics(spec, cfg.species, fit)
    # spatial-phase dephasing scale <v_z^2/v^2> k l_s / 2 for the record
    vw = cfg.velocity.transverse_width_base
    vm = cfg.velocity.mean_speed
    dephase = 0.5 * (vw / vm) ** 2 * 0.5 * abs(cfg.species.wavevector * cfg.beamline.path_sum)
    rows = [(fit.shift / TWO_PI, fit.slope_time, fit.window / TWO_PI,
             fit.residual_rms, quality.brightness, quality.contrast)]
    _write_csv(out / "shift.csv", "shift", chash, command,
               ["shift_hz", "slope_time_s", "window_hz", "residual_rms_rad",
                "brightness", "contrast"], rows, meta=_geometry_meta(cfg))
    return {
        "shift_hz": fit.shift / TWO_PI,
        "fringe_period_hz": fit.period_hz,
        "brightness": quality.brightness,
        "contrast": quality.contrast,
        "area_ratio": quality.area_ratio,
        "fisher_resonance": quality.fisher,
        "fisher_reference": quality.fisher_reference,
        "spatial_dephasing_rad": dephase,
    }


def _cmd_stability(cfg, out, chash, threads, command):
    res = stability(cfg, cfg.laser.waist_position, threads=threads)
    rows = [(cfg.laser.waist_position / 1e-2, res.shift / TWO_PI, res.s_per_m, res.s_per_um)]
    _write_csv(out / "stability.csv", "stability", chash, command,
               ["waist_position_cm", "shift_hz", "s_per_m", "s_per_um"], rows,
               meta=_geometry_meta(cfg))
    return {"shift_hz": res.shift / TWO_PI, "s_per_um": res.s_per_um}


def _sweep_rows(result, unit):
    for i, x in enumerate(result.values):
        yield (x / unit,
               result.metrics["brightness"][i], result.metrics["contrast"][i],
               result.metrics["fisher"][i], result.metrics["fisher_over_f0"][i],
               result.metrics["shift"][i] / TWO_PI,
               result.metrics["stability_per_um"][i])


def _cmd_sweep_waist(cfg, out, chash, threads, command):
    sw = cfg.sweep
    if sw is not None and sw.parameter != "waist_position":
        raise ConfigError("sweep.parameter: sweep-waist requires waist_position")
    lo, hi, num = (sw.start, sw.stop, sw.num) if sw else (-0.10, 0.90, 101)
    with_s = sw.with_stability if sw else False
    result = sweep_waist_position(cfg, lo, hi, num, threads=threads, with_stability=with_s)
    cols = ["waist_position_cm", "brightness", "contrast", "fisher",
            "fisher_over_f0", "shift_hz", "stability_per_um"]
    _write_csv(out / "sweep_waist.csv", "sweep-position", chash, command,
               cols, list(_sweep_rows(result, 1e-2)), meta=_geometry_meta(cfg))
    best = {k: {"value_cm": v[0] / 1e-2, "metric": v[1]} for k, v in result.argmax.items()}
    if result.refined_fisher:
        best["fisher_refined"] = {"value_cm": result.refined_fisher[0] / 1e-2,
                                  "metric": result.refined_fisher[1]}
    return best


def _cmd_sweep_size(cfg, out, chash, threads, command):
    sw = cfg.sweep
    if sw is not None and sw.parameter != "waist_radius":
        raise ConfigError("sweep.parameter: sweep-size requires waist_radius")
    lo, hi, num = (sw.start, sw.stop, sw.num) if sw else (0.05e-3, 0.60e-3, 56)
    result = sweep_waist_size(cfg, lo, hi, num, threads=threads)
    cols = ["waist_radius_mm", "brightness", "contrast", "fisher",
            "fisher_over_f0", "shift_hz", "stability_per_um"]
    _write_csv(out / "sweep_size.csv", "sweep-size", chash, command,
               cols, list(_sweep_rows(result, 1e-3)), meta=_geometry_meta(cfg))
    best = {k: {"value_mm": v[0] / 1e-3, "metric": v[1]} for k, v in result.argmax.items()}
    if result.refined_fisher:
        best["fisher_refined"] = {"value_mm": result.refined_fisher[0] / 1e-3,
                                  "metric": result.refined_fisher[1]}
    return best


def _cmd_oracle_check(cfg, out, chash, threads, command):
    species = cfg.species
    laser = cfg.laser
    v_m = cfg.velocity.mean_speed
    zr = laser.rayleigh_range
    import dataclasses

    rows = []
    worst = 0.0
    for a_pi in ORACLE_AREAS_PI:
        lg = dataclasses.replace(laser, target_pulse_area=a_pi * math.pi)
        tau0 = lg.waist_radius / v_m
        for zz in ORACLE_Z_OVER_ZR:
            z = zz * zr
            for dt in ORACLE_DETUNING_TAU:
                delta = dt / tau0
                pulse = effective_pulse(lg, z, v_m, v_m, delta)
                p_m = math.sin(pulse.half_area) ** 2
                p_t = excitation_probability(
                    trotter_unitary(lg, z, v_m, v_m, delta, ORACLE_TROTTER_STEPS))
                err = abs(p_m - p_t)
                worst = max(worst, err)
                rows.append((a_pi, zz, dt, p_m, p_t, err))
    _write_csv(out / "oracle_grid.csv", "oracle", chash, command,
               ["pulse_area_pi", "z_over_zr", "delta_tau0", "p_magnus",
                "p_trotter", "abs_error"], rows)

    # Ramsey-background comparison for three speeds (plane-wave pair)
    lg = dataclasses.replace(laser, plane_wave=True)
    tau0 = lg.waist_radius / v_m
    ramsey_rows = []
    for speed in (2.0 * v_m, v_m, 2.0 * v_m / 3.0):
        for dt in np.linspace(-3.0, 3.0, 61):
            delta = dt / tau0
            pulse = effective_pulse(lg, 0.0, speed, v_m, delta)
            a_m = ramsey_parts(pulse.half_area, pulse.half_area).a_plus
            p_t = excitation_probability(
                trotter_unitary(lg, 0.0, speed, v_m, delta, ORACLE_TROTTER_STEPS))
            a_t = 2.0 * p_t * (1.0 - p_t)
            ramsey_rows.append((speed, delta / TWO_PI, a_m, a_t, abs(a_m - a_t)))
    _write_csv(out / "oracle_ramsey.csv", "oracle-ramsey", chash, command,
               ["speed_m_per_s", "delta_hz", "a_magnus", "a_trotter", "abs_error"],
               ramsey_rows)
    passed = worst <= ORACLE_THRESHOLD
    print(f"oracle-check: max |p_magnus - p_trotter(n={ORACLE_TROTTER_STEPS})| "
          f"= {worst:.3e} ({'PASS' if passed else 'FAIL'} vs {ORACLE_THRESHOLD})")
    return {"max_abs_error": worst, "threshold": ORACLE_THRESHOLD, "passed": passed}


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "fringes": _cmd_spectrum,
    "sweep-waist": _cmd_sweep_waist,
    "sweep-size": _cmd_sweep_size,
    "fisher": _cmd_fisher,
    "shift": _cmd_shift,
    "stability": _cmd_stability,
    "oracle-check": _cmd_oracle_check,
}


def _usage(out=None):
    out = sys.stderr if out is None else out
    print("usage: rbclock COMMAND [--config PATH] [--set key=value ...] "
          "[--out DIR] [--threads N]", file=out)
    print(f"commands: {', '.join(COMMANDS)}", file=out)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help"):
        _usage(sys.stdout if argv else None)
        return EXIT_OK if argv else EXIT_USAGE
    command, rest = argv[0], argv[1:]
    if command not in COMMANDS:
        print(f"unknown command: {command}", file=sys.stderr)
        _usage()
        return EXIT_USAGE

    parser = argparse.ArgumentParser(prog=f"rbclock {command}", add_help=True)
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--set", dest="overrides", action="append", default=[])
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(rest)

    started = time.monotonic()
    try:
        if args.config is not None:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        else:
            data = {}
        data = _apply_overrides(data, args.overrides)
        cfg = config_from_dict(data)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    args.out.mkdir(parents=True, exist_ok=True)
    chash = hashlib.sha256(serialize_config(cfg).encode()).hexdigest()
    try:
        results = _HANDLERS[command](cfg, args.out, chash, args.threads, command)
    except DegenerateFitError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summary = _summary(cfg, results, started)
    name = command.replace("-", "_")
    (args.out / f"{name}_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
