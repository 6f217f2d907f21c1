"""Publication-style figures from rbclock CSV output.

Usage: clockfigs FIGURE_ID input.csv [input2.csv ...] --out figure.png

Figure ids and their expected inputs:

  backgrounds        spectrum CSVs   overlaid background vs detuning (MHz)
  fringes            spectrum CSVs   contrast + envelopes vs offset (kHz), one panel each
  comparison         4 CSVs          background/fringe pairs for two geometries
  quality-position   sweep-position  brightness & contrast panel + Fisher panel
  quality-size       sweep-size      same metrics vs waist radius (mm)
  shift-stability    sweep-position  fringe shift (Hz) and stability (/um) panels
  propagator-check   oracle-ramsey   analytic pair background vs exact points

Everything plotted comes from the CSV files; no physics is recomputed here.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .csvdata import SchemaError, Table, expect_schema, read_table

STYLE = {
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.25,
    "font.size": 9,
    "lines.linewidth": 1.1,
}

_SPECTRUM_COLS = ["delta_hz", "delta_rel_hz", "background", "contrast",
                  "signal", "envelope_lower", "envelope_upper"]
_SWEEP_COLS = ["brightness", "contrast", "fisher", "fisher_over_f0",
               "shift_hz", "stability_per_um"]


def _zone_lines(ax, table: Table, x_unit: float = 1.0):
    zones = table.zones_cm()
    if zones:
        for z in zones:
            ax.axvline(z * x_unit, color="k", lw=0.8, alpha=0.6)


def fig_backgrounds(tables: list[Table]):
    tables = [expect_schema(t, "spectrum", _SPECTRUM_COLS) for t in tables]
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    for t in tables:
        ax.plot(t["delta_hz"] / 1e6, t["background"], label=t.label)
    ax.set_xlabel("detuning (MHz)")
    ax.set_ylabel("background b")
    ax.legend(fontsize=7)
    return fig


def fig_fringes(tables: list[Table]):
    tables = [expect_schema(t, "spectrum", _SPECTRUM_COLS) for t in tables]
    fig, axes = plt.subplots(len(tables), 1, figsize=(5.2, 2.6 * len(tables)),
                             sharex=True, squeeze=False)
    for ax, t in zip(axes[:, 0], tables):
        x = t["delta_rel_hz"] / 1e3
        ax.plot(x, t["contrast"], color="tab:blue")
        ax.plot(x, t["envelope_lower"], color="k", lw=1.0)
        ax.plot(x, -t["envelope_lower"], color="k", lw=1.0)
        ax.set_ylabel(f"contrast\n{t.label}", fontsize=7)
    axes[-1, 0].set_xlabel("detuning - recoil (kHz)")
    return fig


def fig_comparison(tables: list[Table]):
    if len(tables) != 4:
        raise SchemaError("comparison needs exactly four CSVs: "
                          "background A, fringes A, background B, fringes B")
    tables = [expect_schema(t, "spectrum", _SPECTRUM_COLS) for t in tables]
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 5.2))
    for col, (bg, fr) in enumerate([(tables[0], tables[1]), (tables[2], tables[3])]):
        axes[0, col].plot(bg["delta_hz"] / 1e6, bg["signal"])
        axes[0, col].set_xlabel("detuning (MHz)")
        axes[0, col].set_title(bg.label, fontsize=8)
        axes[1, col].plot(fr["delta_rel_hz"] / 1e3, fr["signal"])
        axes[1, col].set_xlabel("detuning - recoil (kHz)")
        axes[1, col].set_title(fr.label, fontsize=8)
    for ax in axes[:, 0]:
        ax.set_ylabel("signal P")
    fig.tight_layout()
    return fig


def _quality(tables: list[Table], schema: str, xcol: str, xlabel: str, x_unit=1.0,
             vlines=False):
    tables = [expect_schema(t, schema, [xcol] + _SWEEP_COLS) for t in tables]
    fig, (top, bot) = plt.subplots(2, 1, figsize=(5.4, 5.4), sharex=True)
    for t in tables:
        x = t[xcol] * x_unit
        top.plot(x, t["brightness"], label=f"b0 {t.label}")
        top.plot(x, t["contrast"], "--", label=f"c0 {t.label}")
        bot.plot(x, t["fisher_over_f0"], label=t.label)
    if vlines:
        _zone_lines(top, tables[0])
        _zone_lines(bot, tables[0])
    top.set_ylabel("brightness / contrast")
    top.legend(fontsize=6)
    bot.set_ylabel("Fisher information / reference")
    bot.set_xlabel(xlabel)
    bot.legend(fontsize=6)
    return fig


def fig_quality_position(tables):
    return _quality(tables, "sweep-position", "waist_position_cm",
                    "waist position (cm)", vlines=True)


def fig_quality_size(tables):
    return _quality(tables, "sweep-size", "waist_radius_mm", "waist radius (mm)")


def fig_shift_stability(tables: list[Table]):
    tables = [expect_schema(t, "sweep-position", ["waist_position_cm"] + _SWEEP_COLS)
              for t in tables]
    fig, (top, bot) = plt.subplots(2, 1, figsize=(5.4, 5.4), sharex=True)
    for t in tables:
        x = t["waist_position_cm"]
        top.plot(x, t["shift_hz"], label=t.label)
        bot.plot(x, t["stability_per_um"], label=t.label)
    for ax in (top, bot):
        _zone_lines(ax, tables[0])
        ax.legend(fontsize=6)
    top.set_ylabel("fringe shift (Hz)")
    top.axhline(0.0, color="k", lw=0.8)
    bot.set_ylabel("fractional stability per um")
    bot.set_xlabel("waist position (cm)")
    return fig


def fig_propagator_check(tables: list[Table]):
    if len(tables) != 1:
        raise SchemaError("propagator-check takes exactly one CSV")
    t = expect_schema(tables[0], "oracle-ramsey",
                      ["speed_m_per_s", "delta_hz", "a_magnus", "a_trotter"])
    speeds = sorted(set(t["speed_m_per_s"]))
    fig, axes = plt.subplots(1, len(speeds), figsize=(3.0 * len(speeds), 2.8),
                             sharey=True, squeeze=False)
    for ax, v in zip(axes[0], speeds):
        sel = t["speed_m_per_s"] == v
        x = t["delta_hz"][sel] / 1e6
        ax.plot(x, t["a_magnus"][sel], label="analytic")
        ax.plot(x[::4], t["a_trotter"][sel][::4], "r.", ms=4, label="exact")
        ax.set_title(f"v = {v:.0f} m/s", fontsize=8)
        ax.set_xlabel("detuning (MHz)")
    axes[0][0].set_ylabel("pair background a")
    axes[0][0].legend(fontsize=6)
    return fig


FIGURES = {
    "backgrounds": fig_backgrounds,
    "fringes": fig_fringes,
    "comparison": fig_comparison,
    "quality-position": fig_quality_position,
    "quality-size": fig_quality_size,
    "shift-stability": fig_shift_stability,
    "propagator-check": fig_propagator_check,
}


def render(figure_id: str, csv_paths: list, out_path) -> Path:
    """Render one figure from CSV inputs; raises SchemaError on bad input."""
    if figure_id not in FIGURES:
        raise SchemaError(f"unknown figure id {figure_id!r}; "
                          f"known: {', '.join(sorted(FIGURES))}")
    if not csv_paths:
        raise SchemaError("at least one CSV input required")
    tables = [read_table(Path(p)) for p in csv_paths]
    with plt.rc_context(STYLE):
        fig = FIGURES[figure_id](tables)
        out = Path(out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
        plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="clockfigs", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("figure_id", choices=sorted(FIGURES))
    parser.add_argument("csv", nargs="+", type=Path)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args(argv)
    try:
        out = render(args.figure_id, args.csv, args.out)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
