"""Resonance fluorescence and quadrature squeezing spectra of a driven
two-level atom near a photonic bandedge.

Frequencies are expressed in units of the coupling scale ``beta``; the
spectral variable ``omega`` is always the offset from the drive frequency,
which equals the atomic transition frequency (resonant pumping).
"""

from .errors import (
    ConfigError,
    NonConvergence,
    ParameterError,
    SingularResponse,
    SingularSteadyState,
    StepSizeTooLarge,
)
from .kernels import (
    CouplingParams,
    FrequencyGrid,
    KernelPair,
    Mode,
    ModelParams,
    compute_beta,
    dos_anisotropic,
    evaluate_kernels,
    kernel_g,
    kernel_gc,
    kernel_markovian,
    reservoir_density,
)
from .bloch import (
    SteadyState,
    fluctuation_spectra,
    noise_density,
    response_matrix,
    steady_state,
)
from .spectra import (
    SpectrumTable,
    compute_spectra,
    detect_squeezing,
    intensity_spectrum,
    peak_analysis,
    quadrature_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CouplingParams",
    "FrequencyGrid",
    "KernelPair",
    "Mode",
    "ModelParams",
    "NonConvergence",
    "ParameterError",
    "SingularResponse",
    "SingularSteadyState",
    "SpectrumTable",
    "SteadyState",
    "StepSizeTooLarge",
    "compute_beta",
    "compute_spectra",
    "detect_squeezing",
    "dos_anisotropic",
    "evaluate_kernels",
    "fluctuation_spectra",
    "intensity_spectrum",
    "kernel_g",
    "kernel_gc",
    "kernel_markovian",
    "noise_density",
    "peak_analysis",
    "quadrature_spectrum",
    "reservoir_density",
    "response_matrix",
    "steady_state",
]
