"""Superpotentials, partner potentials and zero-energy ground states for the three functions.

Ground states are normalised to psi(0) = 1, which is what
psi(x) = exp(-int_0^x W) produces.  L2 norms are reported as metadata only.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, DomainError, NumericalError
from .specialfn import (
    DEFAULT_TOL,
    PHI_HALF_WIDTH,
    EvalTolerances,
    generalized_airy,
    phi_kernel_array,
    phi_log_derivative_array,
    phi_second_log_derivative_array,
)
from .wavefuncs import FunctionId, Grid, fmt_real

__all__ = [
    "SuperpotentialSpec",
    "PotentialCurve",
    "superpotential",
    "superpotential_derivative",
    "minus_potential",
    "minus_potential_closed_form",
    "plus_potential",
    "ground_state",
    "ground_state_from_superpotential",
    "first_derivative",
    "second_derivative",
    "third_derivative",
    "annihilation_residual",
    "hamiltonian_residual",
    "momentum_ode_residual",
    "potential_curve",
]


@dataclass(frozen=True)
class SuperpotentialSpec:
    """W = g x^3 + eps (F1), g sinh x + eps (F2), -Phi'/Phi + eps (F3; g unused)."""

    function: FunctionId
    g: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "function", FunctionId.parse(self.function))
        if not self.g > 0:
            raise DomainError("g must be > 0")

    @classmethod
    def standard(cls, function, epsilon: float = 0.0) -> "SuperpotentialSpec":
        """g = 1/64 for F1 (matching exp(-x^4/256)), g = 1 otherwise."""
        fid = FunctionId.parse(function)
        return cls(fid, 1.0 / 64.0 if fid is FunctionId.F1_quartic else 1.0, epsilon)


def _check_phi_window(spec: SuperpotentialSpec, x):
    if spec.function is FunctionId.F3_xi and np.any(np.abs(x) > PHI_HALF_WIDTH + 1e-12):
        raise DomainError(f"F3 potentials are evaluated on |x| <= {PHI_HALF_WIDTH}")


def superpotential(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    x = np.asarray(x, dtype=float)
    _check_phi_window(spec, x)
    if spec.function is FunctionId.F1_quartic:
        w = spec.g * x**3 + spec.epsilon
    elif spec.function is FunctionId.F2_cosh:
        w = spec.g * np.sinh(x) + spec.epsilon
    else:
        w = -phi_log_derivative_array(x, tol) + spec.epsilon
    return w if w.ndim else float(w)


def superpotential_derivative(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    """W'(x): 3 g x^2, g cosh x, or (Phi'/Phi)^2 - Phi''/Phi."""
    x = np.asarray(x, dtype=float)
    _check_phi_window(spec, x)
    if spec.function is FunctionId.F1_quartic:
        d = 3 * spec.g * x**2
    elif spec.function is FunctionId.F2_cosh:
        d = spec.g * np.cosh(x)
    else:
        r1 = phi_log_derivative_array(x, tol)
        d = r1**2 - phi_second_log_derivative_array(x, tol)
    return d if d.ndim else float(d)


def minus_potential(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    """V_- = W^2 - W' from the generic superpotential."""
    w = np.asarray(superpotential(spec, x, tol))
    v = w**2 - np.asarray(superpotential_derivative(spec, x, tol))
    return v if v.ndim else float(v)


def plus_potential(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    w = np.asarray(superpotential(spec, x, tol))
    v = w**2 + np.asarray(superpotential_derivative(spec, x, tol))
    return v if v.ndim else float(v)


def minus_potential_closed_form(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    """The expanded forms of V_- written out per function (independent of ``minus_potential``)."""
    x = np.asarray(x, dtype=float)
    _check_phi_window(spec, x)
    g, e = spec.g, spec.epsilon
    if spec.function is FunctionId.F1_quartic:
        v = g**2 * x**6 + 2 * e * g * x**3 + e**2 - 3 * g * x**2
    elif spec.function is FunctionId.F2_cosh:
        v = g**2 * np.sinh(x) ** 2 + e**2 + 2 * e * g * np.sinh(x) - g * np.cosh(x)
    else:
        v = -2 * e * phi_log_derivative_array(x, tol) + e**2 + phi_second_log_derivative_array(x, tol)
    return v if v.ndim else float(v)


def ground_state(spec: SuperpotentialSpec, x, tol: EvalTolerances = DEFAULT_TOL):
    """Closed-form exp(-int_0^x W), psi(0) = 1."""
    x = np.asarray(x, dtype=float)
    _check_phi_window(spec, x)
    g, e = spec.g, spec.epsilon
    if spec.function is FunctionId.F1_quartic:
        psi = np.exp(-g * x**4 / 4 - e * x)
    elif spec.function is FunctionId.F2_cosh:
        psi = np.exp(-g * (np.cosh(x) - 1) - e * x)
    else:
        psi = phi_kernel_array(x, 0, tol) / phi_kernel_array(np.array(0.0), 0, tol) * np.exp(-e * x)
    return psi if psi.ndim else float(psi)


def ground_state_from_superpotential(spec: SuperpotentialSpec, x: float, tol: EvalTolerances = DEFAULT_TOL) -> float:
    """exp(-int_0^x W(t) dt).

    F1 and F2 use the closed antiderivative; F3 integrates W numerically.
    """
    x = float(x)
    if spec.function is not FunctionId.F3_xi:
        return float(ground_state(spec, x, tol))
    _check_phi_window(spec, x)
    integral, err = quad(lambda t: float(superpotential(spec, t, tol)), 0.0, x, epsabs=1e-13, epsrel=1e-13, limit=200)
    if err > 1e-9:
        raise NumericalError(f"quadrature of the F3 superpotential failed (error estimate {err:.2g})")
    return math.exp(-integral)


# ---------------------------------------------------------------------------
# central differences (interior points only)


def first_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order 5-point stencil; returns values for f[2:-2]."""
    return (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)


def second_derivative(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order 5-point stencil; returns values for f[2:-2]."""
    return (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)


def third_derivative(f: np.ndarray, h: float, order: int = 2) -> np.ndarray:
    """Third derivative: 5-point O(h^2) (values for f[2:-2]) or 7-point O(h^4) (f[3:-3])."""
    if order == 2:
        return (-f[:-4] + 2 * f[1:-3] - 2 * f[3:-1] + f[4:]) / (2 * h**3)
    if order == 4:
        return (f[:-6] - 8 * f[1:-5] + 13 * f[2:-4] - 13 * f[4:-2] + 8 * f[5:-1] - f[6:]) / (8 * h**3)
    raise ConfigError("third_derivative supports order 2 or 4")


def annihilation_residual(spec: SuperpotentialSpec, grid: Grid, tol: EvalTolerances = DEFAULT_TOL) -> float:
    """max_j |psi'(x_j) + W(x_j) psi(x_j)| with 4th-order differences (A psi = 0 in position space)."""
    x = grid.points()
    psi = np.asarray(ground_state(spec, x, tol))
    w = np.asarray(superpotential(spec, x[2:-2], tol))
    return float(np.max(np.abs(first_derivative(psi, grid.dx) + w * psi[2:-2])))


def hamiltonian_residual(spec: SuperpotentialSpec, grid: Grid, tol: EvalTolerances = DEFAULT_TOL) -> float:
    """max_j |-psi'' + V_- psi| with 4th-order differences (zero-energy ground state)."""
    x = grid.points()
    psi = np.asarray(ground_state(spec, x, tol))
    v = np.asarray(minus_potential(spec, x[2:-2], tol))
    return float(np.max(np.abs(-second_derivative(psi, grid.dx) + v * psi[2:-2])))


def momentum_ode_residual(window: tuple[float, float] = (-2.0, 2.0), dx: float = 1e-3, coupling: float = 64.0,
                          order: int = 2, tol: EvalTolerances = DEFAULT_TOL) -> tuple[float, float]:
    """max |-f''' + 64 p f| for f = generalized_airy(., 0) on an equispaced p grid.

    Returns ``(residual, max|f|)``.  ``order=2`` is the 5-point stencil.
    """
    lo, hi = window
    n = int(round((hi - lo) / dx))
    p = lo + dx * np.arange(n + 1)
    f = np.array([generalized_airy(v, 0.0, tol).real for v in p])
    d3 = third_derivative(f, dx, order)
    cut = 2 if order == 2 else 3
    res = np.abs(-d3 + coupling * p[cut:-cut] * f[cut:-cut])
    return float(res.max()), float(np.abs(f).max())


@dataclass
class PotentialCurve:
    grid: Grid
    v_minus: np.ndarray
    psi: np.ndarray
    v_plus: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.v_minus = np.asarray(self.v_minus, dtype=float)
        self.psi = np.asarray(self.psi, dtype=float)
        if np.any(self.psi <= 0):
            raise NumericalError("ground state must be strictly positive on the grid")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "v_minus", "psi"])
        for x, v, s in zip(self.grid.points(), self.v_minus, self.psi):
            w.writerow([fmt_real(x), fmt_real(v), fmt_real(s)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "type": "PotentialCurve",
            "n_points": self.grid.n_points,
            "dx": self.grid.dx,
            "v_minus": self.v_minus.tolist(),
            "psi": self.psi.tolist(),
            "v_plus": None if self.v_plus is None else np.asarray(self.v_plus).tolist(),
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PotentialCurve":
        d = json.loads(text)
        return cls(Grid(d["n_points"], d["dx"]), d["v_minus"], d["psi"], d["v_plus"], d.get("meta", {}))


def potential_curve(spec: SuperpotentialSpec, grid: Grid, tol: EvalTolerances = DEFAULT_TOL) -> PotentialCurve:
    x = grid.points()
    psi = np.asarray(ground_state(spec, x, tol))
    l2 = float(np.sqrt(np.sum(psi**2) * grid.dx))
    meta = {"function": spec.function.value, "g": spec.g, "epsilon": spec.epsilon, "l2_norm": l2}
    return PotentialCurve(grid, minus_potential(spec, x, tol), psi, plus_potential(spec, x, tol), meta)
