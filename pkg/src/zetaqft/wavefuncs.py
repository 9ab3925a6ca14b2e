"""The three ground states in position space and their momentum-space transforms."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, DomainError
from .specialfn import (
    AIRY_FOURIER_RATIO,
    DEFAULT_TOL,
    EvalTolerances,
    bessel_k_imag_array,
    generalized_airy,
    phi_kernel_array,
    xi_line_array,
)

__all__ = [
    "FunctionId",
    "DeformationParams",
    "Space",
    "Grid",
    "SampledCurve",
    "FOURIER_CONSTANT",
    "DEFAULT_WINDOWS",
    "position_wavefunction",
    "position_wavefunction_array",
    "momentum_wavefunction",
    "momentum_wavefunction_array",
    "sample_curve",
    "fmt_real",
]


class FunctionId(str, Enum):
    F1_quartic = "f1"
    F2_cosh = "f2"
    F3_xi = "f3"

    @classmethod
    def parse(cls, value) -> "FunctionId":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        for member in cls:
            if text in (member.value, member.name.lower()):
                return member
        raise ConfigError(f"unknown function id {value!r}; expected one of f1, f2, f3")


class Space(str, Enum):
    position = "position"
    momentum = "momentum"


# momentum_wavefunction / unitary transform of position_wavefunction, kernel exp(-ipx), any eps
FOURIER_CONSTANT = {
    FunctionId.F1_quartic: AIRY_FOURIER_RATIO,
    FunctionId.F2_cosh: 1.0,
    FunctionId.F3_xi: 1.0,
}

# zero-search windows in p, read off the figure ranges
DEFAULT_WINDOWS = {
    FunctionId.F1_quartic: (0.0, 4.0),
    FunctionId.F2_cosh: (0.0, 6.0),
    FunctionId.F3_xi: (0.0, 26.0),
}


@dataclass(frozen=True)
class DeformationParams:
    epsilon: float = 0.0
    g: float = 1.0 / 64.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise DomainError(f"g must be > 0, got {self.g}")


@dataclass(frozen=True)
class Grid:
    """Half-integer centred lattice x_j = dx * (j - (n_points - 1)/2)."""

    n_points: int
    dx: float

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("a grid needs at least two points")
        if not self.dx > 0:
            raise ConfigError("grid spacing must be positive")

    def points(self) -> np.ndarray:
        return self.dx * (np.arange(self.n_points) - 0.5 * (self.n_points - 1))

    @classmethod
    def covering(cls, half_width: float, dx: float) -> "Grid":
        """Smallest centred grid of spacing ``dx`` reaching ``[-half_width, half_width]``."""
        n = int(math.ceil(2 * half_width / dx)) + 1
        return cls(n, dx)


def fmt_real(v: float) -> str:
    return format(float(v), ".17g")


@dataclass
class SampledCurve:
    coordinates: np.ndarray
    values: np.ndarray
    space: Space
    function: FunctionId
    params: DeformationParams = field(default_factory=DeformationParams)

    def __post_init__(self):
        self.coordinates = np.asarray(self.coordinates, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.coordinates.shape != self.values.shape or self.coordinates.ndim != 1:
            raise ConfigError("coordinates and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.coordinates) <= 0):
            raise ConfigError("coordinates must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("sampled values contain NaN or Inf")
        self.space = Space(self.space)
        self.function = FunctionId.parse(self.function)

    def __len__(self):
        return len(self.coordinates)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def to_csv(self, log: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["coordinate", "re", "im", "abs"] + (["log10_abs"] if log else [])
        writer.writerow(header)
        mags = self.magnitude
        with np.errstate(divide="ignore"):
            logs = np.log10(mags)
        for c, v, m, lg in zip(self.coordinates, self.values, mags, logs):
            row = [fmt_real(c), fmt_real(v.real), fmt_real(v.imag), fmt_real(m)]
            if log:
                row.append(fmt_real(lg))
            writer.writerow(row)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "type": "SampledCurve",
            "space": self.space.value,
            "function": self.function.value,
            "epsilon": self.params.epsilon,
            "g": self.params.g,
            "coordinates": [float(c) for c in self.coordinates],
            "re": [float(v.real) for v in self.values],
            "im": [float(v.imag) for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "SampledCurve":
        values = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(
            coordinates=np.asarray(data["coordinates"], dtype=float),
            values=values,
            space=Space(data["space"]),
            function=FunctionId.parse(data["function"]),
            params=DeformationParams(data["epsilon"], data["g"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "SampledCurve":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------


def position_wavefunction_array(fid, x, params: DeformationParams = DeformationParams(),
                                tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    fid = FunctionId.parse(fid)
    x = np.asarray(x, dtype=float)
    eps = params.epsilon
    if fid is FunctionId.F1_quartic:
        return np.exp(-params.g * x**4 / 4.0 - eps * x)
    if fid is FunctionId.F2_cosh:
        return np.exp(-np.cosh(x) - eps * x)
    return phi_kernel_array(x, 0, tol) * np.exp(-eps * x)


def position_wavefunction(fid, x: float, params: DeformationParams = DeformationParams(),
                          tol: EvalTolerances = DEFAULT_TOL) -> float:
    """Ground state in position space: exp(-g x^4/4 - eps x), exp(-cosh x - eps x) or Phi(x) exp(-eps x).

    F1 uses the coupling ``params.g`` (1/64 gives exp(-x^4/256)); F2 is the
    g = 1 case of its superpotential family.  For F3 the float result
    underflows beyond |x| ~ 2.7.
    """
    return float(position_wavefunction_array(fid, np.array([x]), params, tol)[0])


def _airy_scale(g: float) -> float:
    # exp(-g x^4/4) = exp(-(s^-1 x)^4/256) with s = (64 g)^(-1/4)
    return (64.0 * g) ** -0.25


def momentum_wavefunction_array(fid, ps, params: DeformationParams = DeformationParams(),
                                tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    fid = FunctionId.parse(fid)
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    eps = params.epsilon
    if fid is FunctionId.F1_quartic:
        s = _airy_scale(params.g)
        # the series carries the opposite sign of i p x, hence the conjugate
        return np.conj([s * generalized_airy(s * p, s * eps, tol) for p in ps]).astype(complex)
    if fid is FunctionId.F2_cosh:
        return bessel_k_imag_array(ps, eps, tol)
    return xi_line_array(ps, eps, tol)


def momentum_wavefunction(fid, p: float, params: DeformationParams = DeformationParams(),
                          tol: EvalTolerances = DEFAULT_TOL) -> complex:
    """Momentum-space function: generalized Airy, K_{ip+eps}(1) integral, or xi on the line.

    All three equal ``FOURIER_CONSTANT[fid]`` times the unitary transform of the
    position function.  For F1 that is the conjugate of ``generalized_airy``
    (they coincide at eps = 0), with the argument rescaled when ``g != 1/64``.
    """
    return complex(momentum_wavefunction_array(fid, [p], params, tol)[0])


def sample_curve(fid, grid: Grid, params: DeformationParams = DeformationParams(),
                 space: Space = Space.position, tol: EvalTolerances = DEFAULT_TOL) -> SampledCurve:
    fid = FunctionId.parse(fid)
    space = Space(space)
    coords = grid.points()
    if space is Space.position:
        values = position_wavefunction_array(fid, coords, params, tol).astype(complex)
    else:
        values = momentum_wavefunction_array(fid, coords, params, tol)
    return SampledCurve(coords, values, space, fid, params)
