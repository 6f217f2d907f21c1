"""Secondary-component suite: render every shipped preset class from CSVs
produced through the primary package's command-line interface, and fail
loudly on schema mismatches."""

import subprocess
import sys
from pathlib import Path

import pytest

from clockfigs import SchemaError, render

FAST = ["--set", "grid.n_speed=40", "--set", "grid.n_transverse=7"]


def rbclock(args, out: Path):
    cmd = [sys.executable, "-m", "rbclock", *args, "--out", str(out)]
    res = subprocess.run(cmd, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return out


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """Small CSV set covering every schema the renderer consumes."""
    root = tmp_path_factory.mktemp("csv")
    rbclock(["spectrum", *FAST, "--set", "detuning.num=41",
             "--set", "detuning.relative_to_recoil=false",
             "--set", "detuning.min_khz=-3000", "--set", "detuning.max_khz=3000"],
            root / "bg_a")
    rbclock(["spectrum", *FAST, "--set", "detuning.num=41",
             "--set", "detuning.relative_to_recoil=false",
             "--set", "detuning.min_khz=-3000", "--set", "detuning.max_khz=3000",
             "--set", "laser.plane_wave=false"], root / "bg_b")
    rbclock(["fringes", *FAST, "--set", "detuning.num=61"], root / "fr_a")
    rbclock(["fringes", *FAST, "--set", "detuning.num=61",
             "--set", "laser.plane_wave=false"], root / "fr_b")
    rbclock(["sweep-waist", *FAST,
             "--set", 'sweep.parameter="waist_position"',
             "--set", "sweep.min_cm=20.0", "--set", "sweep.max_cm=50.0",
             "--set", "sweep.num=4", "--set", "laser.plane_wave=false"],
            root / "sweep_pos")
    rbclock(["sweep-size", *FAST,
             "--set", 'sweep.parameter="waist_radius"',
             "--set", "sweep.min_mm=0.1", "--set", "sweep.max_mm=0.4",
             "--set", "sweep.num=4", "--set", "laser.plane_wave=false"],
            root / "sweep_size")
    rbclock(["oracle-check"], root / "oracle")
    return root


CASES = [
    ("backgrounds", ["bg_a/spectrum.csv", "bg_b/spectrum.csv"]),
    ("fringes", ["fr_a/fringes.csv", "fr_b/fringes.csv"]),
    ("comparison", ["bg_a/spectrum.csv", "fr_a/fringes.csv",
                    "bg_b/spectrum.csv", "fr_b/fringes.csv"]),
    ("quality-position", ["sweep_pos/sweep_waist.csv"]),
    ("quality-size", ["sweep_size/sweep_size.csv"]),
    ("shift-stability", ["sweep_pos/sweep_waist.csv"]),
    ("propagator-check", ["oracle/oracle_ramsey.csv"]),
]


@pytest.mark.parametrize("figure_id,inputs", CASES, ids=[c[0] for c in CASES])
def test_renders_every_preset(figure_id, inputs, artifacts, tmp_path):
    out = tmp_path / f"{figure_id}.png"
    render(figure_id, [artifacts / p for p in inputs], out)
    assert out.exists() and out.stat().st_size > 2000


def test_schema_mismatch_names_problem(artifacts, tmp_path):
    with pytest.raises(SchemaError, match="schema"):
        render("backgrounds", [artifacts / "sweep_pos/sweep_waist.csv"],
               tmp_path / "x.png")
    assert not (tmp_path / "x.png").exists()


def test_missing_column_is_named(artifacts, tmp_path):
    src = (artifacts / "bg_a/spectrum.csv").read_text().splitlines()
    header = next(i for i, l in enumerate(src) if not l.startswith("#"))
    src[header] = src[header].replace("background", "bckgrnd")
    broken = tmp_path / "broken.csv"
    broken.write_text("\n".join(src) + "\n")
    with pytest.raises(SchemaError, match="background"):
        render("backgrounds", [broken], tmp_path / "x.png")
    assert not (tmp_path / "x.png").exists()


def test_empty_csv_writes_nothing(artifacts, tmp_path):
    src = (artifacts / "bg_a/spectrum.csv").read_text().splitlines()
    header = next(i for i, l in enumerate(src) if not l.startswith("#"))
    empty = tmp_path / "empty.csv"
    empty.write_text("\n".join(src[: header + 1]) + "\n")
    with pytest.raises(SchemaError, match="no data rows"):
        render("backgrounds", [empty], tmp_path / "x.png")
    assert not (tmp_path / "x.png").exists()


def test_unknown_figure_id(artifacts, tmp_path):
    with pytest.raises(SchemaError, match="unknown figure id"):
        render("sparklines", [artifacts / "bg_a/spectrum.csv"], tmp_path / "x.png")


def test_unsupported_schema_version(artifacts, tmp_path):
    src = (artifacts / "bg_a/spectrum.csv").read_text()
    bad = tmp_path / "vnext.csv"
    bad.write_text(src.replace("# schema=spectrum/v1", "# schema=spectrum/v2"))
    with pytest.raises(SchemaError, match="version"):
        render("backgrounds", [bad], tmp_path / "x.png")


def test_cli_entry(artifacts, tmp_path):
    from clockfigs.render import main

    out = tmp_path / "cli.png"
    rc = main(["backgrounds", str(artifacts / "bg_a/spectrum.csv"), "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = main(["backgrounds", str(artifacts / "sweep_pos/sweep_waist.csv"),
               "--out", str(tmp_path / "nope.png")])
    assert rc == 1
