"""Zeros of the momentum-space functions: sign-change bisection, grid minima, eps sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from .errors import ConfigError, NumericalError
from .specialfn import DEFAULT_TOL, EvalTolerances
from .wavefuncs import (
    DEFAULT_WINDOWS,
    DeformationParams,
    FunctionId,
    SampledCurve,
    fmt_real,
    momentum_wavefunction_array,
)

__all__ = [
    "Method",
    "ZeroReport",
    "SweepRow",
    "bracket_and_bisect",
    "grid_minima",
    "first_positive_minimum",
    "analytic_zeros",
    "epsilon_sweep",
    "sweep_to_csv",
]


class Method(str, Enum):
    analytic_bisection = "analytic_bisection"
    grid_minimum = "grid_minimum"


@dataclass
class ZeroReport:
    function: FunctionId
    epsilon: float
    zeros: list[float]
    method: Method
    residuals: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.function = FunctionId.parse(self.function)
        self.method = Method(self.method)
        self.zeros = [float(z) for z in self.zeros]
        self.residuals = [float(r) for r in self.residuals]
        if self.zeros != sorted(self.zeros):
            raise ConfigError("zeros must be sorted ascending")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "zero"])
        for z in self.zeros:
            w.writerow([fmt_real(self.epsilon), fmt_real(z)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "type": "ZeroReport",
            "function": self.function.value,
            "epsilon": self.epsilon,
            "zeros": list(map(float, self.zeros)),
            "method": self.method.value,
            "residuals": list(map(float, self.residuals)),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ZeroReport":
        d = json.loads(text)
        return cls(FunctionId.parse(d["function"]), d["epsilon"], d["zeros"], Method(d["method"]), d["residuals"])


def bracket_and_bisect(f: Callable[[float], float], window: tuple[float, float], samples: int = 512,
                       tol: float = 1e-12, values: Sequence[float] | None = None) -> list[float]:
    """Refine every sign change of ``f`` on an equispaced sample of ``window``.

    ``values`` may carry precomputed samples (length ``samples``) when the
    caller has a vectorised evaluator.  Exact zeros on sample points are
    returned as-is.
    """
    lo, hi = map(float, window)
    if not hi > lo:
        raise ConfigError("window must satisfy lo < hi")
    if samples < 64:
        raise ConfigError("at least 64 samples are required")
    xs = np.linspace(lo, hi, samples)
    ys = np.array([f(x) for x in xs] if values is None else values, dtype=float)
    if ys.shape != xs.shape:
        raise ConfigError("precomputed values do not match the sample count")
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    for i in range(samples - 1):
        ya, yb = ys[i], ys[i + 1]
        if ya == 0.0 or yb == 0.0 or (ya > 0) == (yb > 0):
            continue
        a, b = xs[i], xs[i + 1]
        while b - a > tol:
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            ym = f(m)
            if ym == 0.0:
                a = b = m
                break
            if (ym > 0) == (ya > 0):
                a, ya = m, ym
            else:
                b = m
        roots.append(0.5 * (a + b))
    return sorted(roots)


def grid_minima(curve: SampledCurve, use_log: bool = False, prominence: float = 0.0) -> list[tuple[float, float]]:
    """Strict local minima of |value| (or log10|value|) with at least ``prominence``.

    ``prominence`` is in units of |value| for the linear scale and in decades
    for the log scale; the default keeps every strict local minimum.
    Returns (coordinate, |value|) pairs sorted by coordinate.
    """
    mag = curve.magnitude
    if len(mag) == 0:
        return []
    if use_log:
        with np.errstate(divide="ignore"):
            sig = np.log10(mag)
        sig = np.where(np.isfinite(sig), sig, np.min(sig[np.isfinite(sig)], initial=0.0) - 10.0)
    else:
        sig = mag
    peaks, _ = find_peaks(-sig, prominence=prominence)
    return [(float(curve.coordinates[k]), float(mag[k])) for k in sorted(peaks)]


def first_positive_minimum(curve: SampledCurve, use_log: bool = False, prominence: float = 0.0) -> float | None:
    pos = [c for c, _ in grid_minima(curve, use_log, prominence) if c > 0]
    return pos[0] if pos else None


def _real_branch(fid: FunctionId, params: DeformationParams, tol: EvalTolerances):
    def f(p: float) -> float:
        return float(momentum_wavefunction_array(fid, [p], params, tol)[0].real)
    return f


def analytic_zeros(fid, params: DeformationParams = DeformationParams(), window: tuple[float, float] | None = None,
                   samples: int = 512, bisect_tol: float = 1e-12, tol: EvalTolerances = DEFAULT_TOL,
                   reality_tol: float = 1e-10) -> ZeroReport:
    """Zeros of the eps = 0 momentum function by sign-change bisection on its real part.

    The imaginary part is checked against ``reality_tol`` times the window
    scale before being discarded.
    """
    fid = FunctionId.parse(fid)
    if params.epsilon != 0:
        raise ConfigError("real-axis bisection needs epsilon = 0; use epsilon_sweep for eps > 0")
    window = window or DEFAULT_WINDOWS[fid]
    xs = np.linspace(window[0], window[1], samples)
    vals = momentum_wavefunction_array(fid, xs, params, tol)
    scale = float(np.max(np.abs(vals)))
    if np.max(np.abs(vals.imag)) > reality_tol * scale:
        raise NumericalError("momentum function is not real on the window at eps = 0")
    f = _real_branch(fid, params, tol)
    zeros = bracket_and_bisect(f, window, samples, bisect_tol, values=vals.real)
    residuals = [abs(f(z)) for z in zeros]
    return ZeroReport(fid, 0.0, zeros, Method.analytic_bisection, residuals)


@dataclass
class SweepRow:
    epsilon: float
    min_abs: float
    zero_count: int
    zeros: list[float] = field(default_factory=list)


def epsilon_sweep(fid, eps_list: Sequence[float], window: tuple[float, float] | None = None, samples: int = 512,
                  g: float = 1.0 / 64.0, zero_rtol: float = 1e-8, tol: EvalTolerances = DEFAULT_TOL) -> list[SweepRow]:
    """Tabulate min |f| over the window and the number of zeros for each eps.

    Every sampled local minimum of |f| is polished by bounded scalar
    minimisation; it counts as a zero when the polished value falls below
    ``zero_rtol`` times max |f| on the window.  The window endpoints take
    part in the minimum.
    """
    fid = FunctionId.parse(fid)
    eps_list = [float(e) for e in eps_list]
    if not eps_list or eps_list != sorted(eps_list) or eps_list[0] != 0.0:
        raise ConfigError("eps_list must be ascending and start at 0")
    window = window or DEFAULT_WINDOWS[fid]
    xs = np.linspace(window[0], window[1], samples)
    rows = []
    for eps in eps_list:
        params = DeformationParams(eps, g)
        mag = np.abs(momentum_wavefunction_array(fid, xs, params, tol))
        scale = float(mag.max())

        def absf(p, params=params):
            return abs(complex(momentum_wavefunction_array(fid, [p], params, tol)[0]))

        candidates = [(float(mag[0]), float(xs[0])), (float(mag[-1]), float(xs[-1]))]
        zeros = []
        for k in range(1, samples - 1):
            if mag[k] <= mag[k - 1] and mag[k] <= mag[k + 1]:
                res = minimize_scalar(absf, bounds=(xs[k - 1], xs[k + 1]), method="bounded",
                                      options={"xatol": 1e-12})
                val = min(float(res.fun), float(mag[k]))
                where = float(res.x) if res.fun <= mag[k] else float(xs[k])
                candidates.append((val, where))
                if val < zero_rtol * scale:
                    zeros.append(where)
        min_abs = min(v for v, _ in candidates)
        rows.append(SweepRow(eps, min_abs, len(zeros), sorted(zeros)))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epsilon", "min_abs", "zero_count"])
    for r in rows:
        w.writerow([fmt_real(r.epsilon), fmt_real(r.min_abs), r.zero_count])
    return buf.getvalue()
