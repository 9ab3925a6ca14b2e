"""Zeros of the quartic-weight Airy function read as eigenvalues of a cubic-kinetic linear potential.

If f''' = 64 p f and f(p_n) = 0, the shifted function f(p - p_n) satisfies
-(1/64) psi''' + p psi = p_n psi, so the zeros double as eigenvalues.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConfigError, WindowExhaustedError
from .specialfn import DEFAULT_TOL, EvalTolerances, generalized_airy
from .susyqm import third_derivative
from .wavefuncs import DeformationParams, FunctionId, SampledCurve, Space, fmt_real
from .zerofinder import bracket_and_bisect

__all__ = [
    "EigenTable",
    "AIRY_COUPLING",
    "ode_residual",
    "eigen_zero_table",
    "eigenfunction",
    "eigenfunction_samples",
    "eigen_relation_residual",
    "semiclassical_estimates",
    "standard_airy",
    "standard_airy_first_zero",
]

AIRY_COUPLING = 64.0
MAX_COUNT = 12


def _airy_real(p: float, tol: EvalTolerances = DEFAULT_TOL) -> float:
    return generalized_airy(p, 0.0, tol).real


def ode_residual(window: tuple[float, float] = (-2.0, 2.0), dx: float = 5e-3, order: int = 4,
                 tol: EvalTolerances = DEFAULT_TOL) -> tuple[float, float]:
    """max |f''' - 64 p f| on an equispaced grid, and max |f|, with f the series-evaluated function."""
    lo, hi = window
    if not hi > lo or dx <= 0:
        raise ConfigError("need lo < hi and dx > 0")
    n = int(round((hi - lo) / dx))
    p = lo + dx * np.arange(n + 1)
    f = np.array([_airy_real(v, tol) for v in p])
    cut = 3 if order == 4 else 2
    res = np.abs(third_derivative(f, dx, order) - AIRY_COUPLING * p[cut:-cut] * f[cut:-cut])
    return float(res.max()), float(np.abs(f).max())


@dataclass
class EigenTable:
    zeros: list[float]
    semiclassical: list[float]
    relative_errors: list[float]

    def __post_init__(self):
        if not len(self.zeros) == len(self.semiclassical) == len(self.relative_errors):
            raise ConfigError("table columns must have equal length")
        if any(b <= a for a, b in zip(self.zeros, self.zeros[1:])):
            raise ConfigError("zeros must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "zero", "semiclassical", "rel_error"])
        for n, row in enumerate(zip(self.zeros, self.semiclassical, self.relative_errors)):
            w.writerow([n, *map(fmt_real, row)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"type": "EigenTable", "zeros": self.zeros, "semiclassical": self.semiclassical,
                "relative_errors": self.relative_errors}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EigenTable":
        d = json.loads(text)
        return cls(d["zeros"], d["semiclassical"], d["relative_errors"])


def semiclassical_estimates(count: int = 7, kind: str = "generalized") -> list[float]:
    """Phase-integral estimates of the n-th zero, n = 0..count-1.

    ``generalized``: ((1/3)(n + 3/4) pi)^(3/4) for the cubic-kinetic problem.
    ``airy``: ((3/2)(n + 3/4) pi)^(2/3), the same rule for the classical Airy zeros.
    """
    if kind == "generalized":
        return [((n + 0.75) * math.pi / 3) ** 0.75 for n in range(count)]
    if kind == "airy":
        return [(1.5 * (n + 0.75) * math.pi) ** (2 / 3) for n in range(count)]
    raise ConfigError("kind must be 'generalized' or 'airy'")


def eigen_zero_table(count: int = 7, tol: float = 1e-10, p_max: float = 16.0, step: float = 4.0,
                     evaluator: EvalTolerances = DEFAULT_TOL) -> EigenTable:
    """First ``count`` positive zeros, found on windows [0, step], [0, 2 step], ... up to ``p_max``."""
    if not 1 <= count <= MAX_COUNT:
        raise ConfigError(f"count must lie in 1..{MAX_COUNT}")
    hi = step
    while True:
        samples = max(512, int(128 * hi))
        zeros = [z for z in bracket_and_bisect(lambda p: _airy_real(p, evaluator), (0.0, hi), samples, 1e-13)
                 if z > 0]
        if len(zeros) >= count:
            break
        if hi >= p_max:
            raise WindowExhaustedError(f"only {len(zeros)} zeros below p = {p_max:g}; {count} requested")
        hi = min(hi + step, p_max)
    zeros = zeros[:count]
    bad = [z for z in zeros if abs(_airy_real(z, evaluator)) >= tol]
    if bad:
        raise WindowExhaustedError(f"residual above {tol:g} at p = {bad[0]:.12g}")
    semi = semiclassical_estimates(count)
    rel = [abs(s - z) / z for s, z in zip(semi, zeros)]
    return EigenTable([float(z) for z in zeros], semi, rel)


def eigenfunction(n: int, p, table: EigenTable, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """psi_n(p) = f(p - p_n); equals 1/Gamma(3/4) at p = p_n."""
    if not 0 <= n < len(table.zeros):
        raise ConfigError(f"eigenfunction index {n} outside the table of {len(table.zeros)} zeros")
    shift = table.zeros[n]
    return np.array([_airy_real(v - shift, tol) for v in np.atleast_1d(np.asarray(p, dtype=float))])


def eigenfunction_samples(n: int, table: EigenTable, half_width: float = 2.0, n_points: int = 401,
                          tol: EvalTolerances = DEFAULT_TOL) -> SampledCurve:
    """Samples of psi_n on [p_n - half_width, p_n + half_width]."""
    shift = table.zeros[n] if 0 <= n < len(table.zeros) else None
    if shift is None:
        raise ConfigError(f"eigenfunction index {n} outside the table of {len(table.zeros)} zeros")
    p = np.linspace(shift - half_width, shift + half_width, n_points)
    return SampledCurve(p, eigenfunction(n, p, table, tol), Space.momentum, FunctionId.F1_quartic,
                        DeformationParams(0.0, 1.0 / 64.0))


def eigen_relation_residual(n: int, table: EigenTable, half_width: float = 2.0, dx: float = 5e-3,
                            tol: EvalTolerances = DEFAULT_TOL) -> tuple[float, float]:
    """max |-(1/64) psi''' + p psi - p_n psi| around p_n, and max |psi| (7-point stencil)."""
    shift = table.zeros[n]
    m = int(round(2 * half_width / dx))
    p = shift - half_width + dx * np.arange(m + 1)
    psi = eigenfunction(n, p, table, tol)
    lhs = -third_derivative(psi, dx, 4) / AIRY_COUPLING + (p[3:-3] - shift) * psi[3:-3]
    return float(np.max(np.abs(lhs))), float(np.max(np.abs(psi)))


def standard_airy(x: float) -> float:
    """Ai(x) = (1/pi) int_0^inf cos(t^3/3 + x t) dt, evaluated on the ray t = e^(i pi/6) s.

    On that ray the oscillation turns into exp(-s^3/3) decay, so plain
    adaptive quadrature converges.  Intended for moderate |x|.
    """
    rot = complex(math.cos(math.pi / 6), math.sin(math.pi / 6))

    def integrand(s: float) -> float:
        return (rot * cmath.exp(-s**3 / 3 + 1j * x * rot * s)).real

    value, _ = quad(integrand, 0.0, 12.0 + abs(x), epsabs=1e-13, epsrel=1e-12, limit=400)
    return value / math.pi


@lru_cache(maxsize=None)
def standard_airy_first_zero() -> float:
    """Magnitude of the first zero of Ai, by root bracketing of ``standard_airy`` on [-3, -2]."""
    return -brentq(standard_airy, -3.0, -2.0, xtol=1e-14)
