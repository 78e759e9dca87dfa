"""cavityfall: cavity-confined photons as massive particles.

Exact in-plane dispersion and effective mass of light standing in a planar
cavity, weak-field gravitational optics and the Newtonian free fall of the
standing wavepacket, split-step spectral propagation of the envelope with
closed-form oracles, and the shot-noise SNR model of the free-fall
interferometry experiment.
"""

__version__ = "0.1.0"

from .dispersion import (
    CavitySpec,
    DispersionPoint,
    dispersion_table,
    effective_mass,
    group_velocity,
    kg_residual,
    photon_energy,
)
from .errors import CavityFallError, DomainError, ValidationError
from .gravity import (
    FreefallState,
    GravityProfile,
    freefall_trajectory,
    gravitational_index,
    index_correction,
    kinetic_correction_scale,
    momentum_from_drop,
    phase_gradient,
    potential_energy,
    proper_time_factor,
)
from .interferometry import (
    ExperimentConfig,
    QThresholdResult,
    SnrTrace,
    interference_signal,
    mode_width,
    phase_difference,
    q_threshold,
    snr,
    snr_trace,
)
from .propagator import (
    AbsorbingLayer,
    GaussianMoments,
    Grid1D,
    PropagationScenario,
    Trace,
    TraceRecord,
    WaveState,
    analytic_gaussian_oracle,
    exact_accelerating_gaussian,
    init_gaussian,
    observables,
    propagate,
    step,
)
from .scenario import (
    OutputSettings,
    PropagationSettings,
    ScenarioFile,
    load_scenario,
    parse_scenario,
    scenario_to_dict,
)
from .units import (
    CODATA,
    Constants,
    UnitScaling,
    from_dimensionless,
    make_scaling,
    to_dimensionless,
)

__all__ = [
    "__version__",
    "CavityFallError",
    "DomainError",
    "ValidationError",
    "Constants",
    "CODATA",
    "UnitScaling",
    "make_scaling",
    "to_dimensionless",
    "from_dimensionless",
    "CavitySpec",
    "DispersionPoint",
    "effective_mass",
    "photon_energy",
    "group_velocity",
    "kg_residual",
    "dispersion_table",
    "GravityProfile",
    "FreefallState",
    "proper_time_factor",
    "gravitational_index",
    "index_correction",
    "kinetic_correction_scale",
    "potential_energy",
    "momentum_from_drop",
    "freefall_trajectory",
    "phase_gradient",
    "Grid1D",
    "AbsorbingLayer",
    "WaveState",
    "PropagationScenario",
    "Trace",
    "TraceRecord",
    "GaussianMoments",
    "init_gaussian",
    "observables",
    "step",
    "propagate",
    "analytic_gaussian_oracle",
    "exact_accelerating_gaussian",
    "ExperimentConfig",
    "SnrTrace",
    "QThresholdResult",
    "mode_width",
    "phase_difference",
    "interference_signal",
    "snr",
    "snr_trace",
    "q_threshold",
    "ScenarioFile",
    "PropagationSettings",
    "OutputSettings",
    "parse_scenario",
    "load_scenario",
    "scenario_to_dict",
]
