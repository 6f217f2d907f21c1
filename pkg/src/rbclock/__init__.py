"""Ramsey-Borde atomic beam clock simulator with Gaussian interrogation lasers."""

__version__ = "0.1.0"

from .config import (
    CONSTANTS,
    AtomSpecies,
    BeamlineGeometry,
    ConfigError,
    RunConfig,
    config_from_dict,
    default_config,
    derive_species,
    load_config,
    serialize_config,
)
from .laser import BeamFrame, LaserGeometry, ZonePulse, beam_frame, effective_pulse, field_at
from .propagator import excitation_probability, magnus_unitary, trotter_unitary
from .interferometer import (
    LOWER,
    UPPER,
    RBComponents,
    RamseyParts,
    Trajectory,
    effective_detunings,
    fringe_phase,
    make_trajectory,
    ramsey_parts,
    rb_probabilities,
    relativistic_detuning,
)
from .velocity import QuadratureGrid, VelocityDistribution, build_grid
from .spectrum import RBSpectrum, averaged_spectrum, single_trajectory_signal
from .analysis import (
    FringeFit,
    brightness_contrast,
    counterprop_residual,
    fisher,
    fisher_resonance_estimate,
    frequency_shift,
    matching_ratio,
    stability,
)
from .optimizer import SweepResult, sweep_waist_position, sweep_waist_size
