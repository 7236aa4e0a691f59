"""Finite-time holonomic gates on the four-level tripod system under parametric noise.

Build the tripod Hamiltonian, drive it around (noisy) loops on the
control sphere, and measure average gate fidelity and solid-angle
statistics across noise models.
"""

__version__ = "0.1.0"

from .model import (
    HolonomyTarget,
    Level,
    ParamPoint,
    computational_ops,
    dark_states,
    embed_in_computational,
    hamiltonian,
    holonomy_target,
    polar_to_cartesian,
)
from .linalg import TOL, Tolerances, expm_reference, matmul, step_exp, unitarity_defect
from .path import PathSpec, ideal_point, ideal_solid_angle, optimal_time
from .noise import (
    CartesianRandom,
    CartesianRandomComplex,
    Monochromatic,
    MonochromaticRealPart,
    NoiseRealization,
    SphereAngular,
    SquareWaveProbe,
    noisy_point,
    rng_stream,
    sample_realization,
)
from .propagator import (
    EvolutionConfig,
    NumericalContractError,
    Propagator,
    evolve,
    evolve_segments,
)
from .fidelity import (
    ChannelEstimate,
    FidelityResult,
    average_gate_fidelity,
    estimate_channel,
    fidelity_state_average_oracle,
)
from .geometry import SolidAngleStats, solid_angle, solid_angle_fluctuations

__all__ = [
    "__version__",
    "CartesianRandom",
    "CartesianRandomComplex",
    "ChannelEstimate",
    "EvolutionConfig",
    "FidelityResult",
    "HolonomyTarget",
    "Level",
    "Monochromatic",
    "MonochromaticRealPart",
    "NoiseRealization",
    "NumericalContractError",
    "ParamPoint",
    "PathSpec",
    "Propagator",
    "SolidAngleStats",
    "SphereAngular",
    "SquareWaveProbe",
    "TOL",
    "Tolerances",
    "average_gate_fidelity",
    "computational_ops",
    "dark_states",
    "embed_in_computational",
    "estimate_channel",
    "evolve",
    "evolve_segments",
    "expm_reference",
    "fidelity_state_average_oracle",
    "hamiltonian",
    "holonomy_target",
    "ideal_point",
    "ideal_solid_angle",
    "matmul",
    "noisy_point",
    "optimal_time",
    "polar_to_cartesian",
    "rng_stream",
    "sample_realization",
    "solid_angle",
    "solid_angle_fluctuations",
    "step_exp",
    "unitarity_defect",
]
