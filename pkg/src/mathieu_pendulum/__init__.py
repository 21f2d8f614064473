"""Exact quantum-pendulum propagator via Mathieu functions, with numerical checks."""

__version__ = "0.1.0"
TOOL_NAME = "mathieu-pendulum"

from .errors import ConvergenceError, DegenerateModeError, IllConditionedError  # noqa: E402
from .mathieu import (  # noqa: E402
    FAMILIES,
    JoiningConstant,
    MathieuMode,
    ModeFamily,
    characteristic_values,
    eval_modified_bessel_series,
    eval_modified_fourier,
    eval_periodic,
    fourier_coefficients,
    joining_constants,
    ode_residual,
    orthogonality_matrix,
)
from .spectrum import (  # noqa: E402
    EnergyLevel,
    SpectrumTable,
    energy_levels,
    negative_coupling_spectrum,
    omega_slope_check,
)

__all__ = [
    "ConvergenceError",
    "DegenerateModeError",
    "EnergyLevel",
    "FAMILIES",
    "IllConditionedError",
    "JoiningConstant",
    "MathieuMode",
    "ModeFamily",
    "SpectrumTable",
    "characteristic_values",
    "energy_levels",
    "eval_modified_bessel_series",
    "eval_modified_fourier",
    "eval_periodic",
    "fourier_coefficients",
    "joining_constants",
    "negative_coupling_spectrum",
    "ode_residual",
    "omega_slope_check",
    "orthogonality_matrix",
]
