import json
from pathlib import Path

import pytest

from rbclock.config import config_from_dict, load_config

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def preset(name: str):
    return load_config((CONFIGS / name).read_text())


def make_config(overrides: dict):
    return config_from_dict(json.loads(json.dumps(overrides)))


@pytest.fixture(scope="session")
def default_cfg():
    return config_from_dict({})


@pytest.fixture(scope="session")
def single_atom_cfg():
    """Collapsed grid: one trajectory at the normalisation speed, on axis."""
    return make_config({
        "grid": {"n_speed": 1, "n_transverse": 1,
                 "speed_min_m_per_s": 610.0, "speed_max_m_per_s": 610.0},
        "laser": {"plane_wave": True, "target_pulse_area_pi": 0.5},
        "flags": {"decay": False},
    })
