"""Numerical companion for zeta-like zeros: special functions, QFT statevector simulation,
SUSY-QM potentials, (p,1) matrix-model polynomials and cubic-kinetic eigenvalues."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    NumericalError,
    ResourceLimitError,
    ToleranceError,
    WindowExhaustedError,
    ZetaQFTError,
)
from .wavefuncs import DeformationParams, FunctionId, Grid, SampledCurve, Space

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "NumericalError",
    "ResourceLimitError",
    "ToleranceError",
    "WindowExhaustedError",
    "ZetaQFTError",
    "DeformationParams",
    "FunctionId",
    "Grid",
    "SampledCurve",
    "Space",
]
