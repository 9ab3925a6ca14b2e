"""Scalar and vectorised special functions behind the three momentum-space functions.

Conventions
-----------
Every Fourier integral uses the symmetric prefactor::

    f~(p) = 1/sqrt(2 pi) * int exp(-i p x) f(x) dx

With that normalisation

* ``bessel_k_imag(p, eps)`` equals ``2/sqrt(2 pi) * K_{ip+eps}(1)``,
* ``xi_line(p, eps)`` equals ``xi(1/2 + eps + ip) / (2 sqrt(2 pi))`` because the
  kernel ``phi_kernel`` lacks the conventional overall factor of 2,
* ``generalized_airy(p, eps)`` (the hypergeometric closed form evaluated at
  ``p + i eps``) equals ``sqrt(4 pi)`` times the complex conjugate of the
  Fourier integral of ``exp(-x**4/256 - eps x)``.  For ``eps = 0`` both sides
  are real so the ratio is the plain constant ``sqrt(4 pi)``.

Zeros are insensitive to all of these constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cache

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError, NumericalError, ToleranceError

__all__ = [
    "EvalTolerances",
    "DEFAULT_TOL",
    "COSH_HALF_WIDTH",
    "PHI_HALF_WIDTH",
    "AIRY_FOURIER_RATIO",
    "gamma_fn",
    "hyp0f2",
    "generalized_airy",
    "bessel_k_imag",
    "bessel_k_imag_array",
    "phi_kernel",
    "phi_kernel_array",
    "phi_log_derivative_array",
    "phi_second_log_derivative_array",
    "verify_phi_evenness",
    "xi_line",
    "xi_line_array",
    "de_fourier",
]

COSH_HALF_WIDTH = 8.0
PHI_HALF_WIDTH = 3.0
# generalized_airy(p, 0) / (Fourier integral of exp(-x^4/256))(p)
AIRY_FOURIER_RATIO = 1.0 / math.sqrt(4.0 * math.pi)

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class EvalTolerances:
    """Stopping rules for series and quadrature.

    ``quadrature_range`` is the truncation half-width ``L`` of integrals over
    the real line; ``None`` selects the per-function default
    (``COSH_HALF_WIDTH`` for the K-Bessel integrand, ``PHI_HALF_WIDTH`` for
    the xi integrand).
    """

    series_term_cutoff: float = 1e-17
    quadrature_abs_tol: float = 1e-13
    quadrature_range: float | None = None
    max_terms: int = 5000
    max_quadrature_level: int = 11

    def __post_init__(self):
        if not self.series_term_cutoff > 0:
            raise DomainError("series_term_cutoff must be > 0")
        if not self.quadrature_abs_tol > 0:
            raise DomainError("quadrature_abs_tol must be > 0")
        if self.quadrature_range is not None and not self.quadrature_range >= 1:
            raise DomainError("quadrature_range must be >= 1")
        if self.max_terms < 1 or self.max_quadrature_level < 1:
            raise DomainError("term and level budgets must be positive")

    def half_width(self, default: float) -> float:
        return default if self.quadrature_range is None else float(self.quadrature_range)


DEFAULT_TOL = EvalTolerances()


# ---------------------------------------------------------------------------
# Gamma and 0F2


def gamma_fn(x, dps: int | None = None):
    """Gamma function for positive real ``x``.

    Returns a float, or an ``mpmath.mpf`` at ``dps`` decimal digits when
    ``dps`` is given (needed where the result multiplies a cancelling sum).
    """
    if dps is None:
        x = float(x)
        if not x > 0:
            raise DomainError(f"gamma_fn requires x > 0, got {x}")
        return math.gamma(x)
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if not x > 0:
            raise DomainError(f"gamma_fn requires x > 0, got {x}")
        return +mpmath.gamma(x)


def _is_nonpositive_integer(b) -> bool:
    return b <= 0 and b == int(b)


def hyp0f2(b1, b2, z, tol: EvalTolerances = DEFAULT_TOL, dps: int | None = None):
    """Generalised hypergeometric series 0F2(;b1,b2;z).

    Sums ``z**n / ((b1)_n (b2)_n n!)`` until ``|term| < cutoff * |partial sum|``
    holds on two consecutive terms.  With ``dps=None`` the sum is carried out
    in double precision complex arithmetic; otherwise in ``mpmath`` at ``dps``
    digits and the ``mpc`` result is returned unrounded.
    """
    if _is_nonpositive_integer(float(b1)) or _is_nonpositive_integer(float(b2)):
        raise DomainError("0F2 parameters must not be non-positive integers")

    if dps is None:
        return _hyp0f2_sum(complex(b1), complex(b2), complex(z), 1.0, tol)
    with mpmath.workdps(dps):
        return _hyp0f2_sum(mpmath.mpf(b1), mpmath.mpf(b2), mpmath.mpc(z), mpmath.mpf(1), tol)


def _hyp0f2_sum(b1, b2, z, one, tol):
    term = one
    total = one
    quiet = 0
    n = 0
    while quiet < 2:
        term = term * z / ((b1 + n) * (b2 + n) * (n + 1))
        n += 1
        total = total + term
        if abs(term) < tol.series_term_cutoff * abs(total) or term == 0:
            quiet += 1
        else:
            quiet = 0
        if n > tol.max_terms:
            raise ConvergenceError(f"0F2 series did not converge in {tol.max_terms} terms (|z|={abs(z):.3g})")
    return total


def _airy_dps(w: complex) -> int:
    # Both 0F2 terms grow like exp(3|w|^(4/3)) while their difference decays,
    # so roughly 1.3 |w|^(4/3) decimal digits cancel.
    return 20 + int(math.ceil(2.0 * abs(w) ** (4.0 / 3.0)))


def generalized_airy(p, eps: float = 0.0, tol: EvalTolerances = DEFAULT_TOL) -> complex:
    """Generalized Airy function (quartic weight) at ``p + i eps``.

    0F2(;1/2,3/4;w^4)/Gamma(3/4) - 2 w^2 0F2(;5/4,3/2;w^4)/Gamma(5/4),
    evaluated with enough working precision to absorb the cancellation
    between the two series.
    """
    w = complex(p) + 1j * float(eps)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError("generalized_airy needs a finite argument")
    dps = _airy_dps(w)
    # the truncation test is relative to each series, which outgrows the result
    tol = replace(tol, series_term_cutoff=tol.series_term_cutoff * mpmath.mpf(10) ** (20 - dps))
    with mpmath.workdps(dps):
        wm = mpmath.mpc(w.real, w.imag)
        z = wm**4
        half, three_q = mpmath.mpf(1) / 2, mpmath.mpf(3) / 4
        five_q, three_h = mpmath.mpf(5) / 4, mpmath.mpf(3) / 2
        first = hyp0f2(half, three_q, z, tol, dps=dps) / gamma_fn(three_q, dps=dps)
        second = 2 * wm**2 * hyp0f2(five_q, three_h, z, tol, dps=dps) / gamma_fn(five_q, dps=dps)
        value = first - second
    return complex(value)


# ---------------------------------------------------------------------------
# Double-exponential quadrature for Fourier integrals


@cache
def _de_rule(level: int, t_max: float = 3.5):
    """tanh-sinh nodes/weights on [-1, 1] with step 2**-level."""
    h = 2.0**-level
    k = int(math.ceil(t_max / h))
    t = h * np.arange(-k, k + 1)
    u = 0.5 * math.pi * np.sinh(t)
    nodes = np.tanh(u)
    weights = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    keep = weights > 1e-300
    nodes, weights = nodes[keep], weights[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _de_level(fx: np.ndarray, x: np.ndarray, w: np.ndarray, ps: np.ndarray) -> np.ndarray:
    phase = np.exp(-1j * np.outer(ps, x))
    return _INV_SQRT_2PI * (phase @ (w * fx))


def de_fourier(position_fn, ps, eps: float, half_width: float, tol: EvalTolerances = DEFAULT_TOL,
               level: int | None = None):
    """(1/sqrt(2pi)) int_{-L}^{L} exp(-i p x) f(x) exp(-eps x) dx for each p in ``ps``.

    ``position_fn`` maps a node array to real integrand values (without the
    ``exp(-eps x)`` factor).  The step is halved until two successive levels
    agree to ``tol.quadrature_abs_tol`` for every ``p``.  Passing ``level``
    evaluates a single fixed level instead (used by the step-doubling tests).
    """
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    L = float(half_width)

    def at(lv):
        t, wt = _de_rule(lv)
        x = L * t
        fx = np.asarray(position_fn(x), dtype=float) * np.exp(-eps * x)
        return _de_level(fx, x, L * wt, ps)

    if level is not None:
        return at(level)
    prev = at(2)
    for lv in range(3, tol.max_quadrature_level + 1):
        cur = at(lv)
        if np.max(np.abs(cur - prev)) <= tol.quadrature_abs_tol:
            return cur
        prev = cur
    raise ToleranceError(
        f"DE quadrature did not reach {tol.quadrature_abs_tol:g} within level {tol.max_quadrature_level}"
    )


# ---------------------------------------------------------------------------
# K-Bessel of imaginary order


def _cosh_tail_bound(L: float, eps: float) -> float:
    # int_L^inf exp(-cosh x + |eps| x) dx <= exp(-cosh L + |eps| L) / (sinh L - |eps|)
    return 2.0 * _INV_SQRT_2PI * math.exp(-math.cosh(L) + abs(eps) * L) / (math.sinh(L) - abs(eps))


def bessel_k_imag_array(ps, eps: float = 0.0, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorised ``bessel_k_imag`` over an array of momenta."""
    eps = float(eps)
    if not abs(eps) < 1:
        raise DomainError(f"bessel_k_imag requires |eps| < 1, got {eps}")
    L = tol.half_width(COSH_HALF_WIDTH)
    if _cosh_tail_bound(L, eps) > tol.quadrature_abs_tol:
        raise ToleranceError(f"truncation at L={L} leaves a tail above {tol.quadrature_abs_tol:g}")
    return de_fourier(lambda x: np.exp(-np.cosh(x)), ps, eps, L, tol)


def bessel_k_imag(p: float, eps: float = 0.0, tol: EvalTolerances = DEFAULT_TOL) -> complex:
    """(1/sqrt(2pi)) int exp(-ipx) exp(-cosh x) exp(-eps x) dx  (= 2 K_{ip+eps}(1) / sqrt(2pi))."""
    return complex(bessel_k_imag_array([p], eps, tol)[0])


# ---------------------------------------------------------------------------
# Phi kernel
#
# With u = exp(2x) and a = pi n^2 the n-th summand is
#   (2 a^2 u^(9/4) - 3 a u^(5/4)) exp(-a u).
# d/dx acts on c a^i u^e exp(-a u) as c (2e a^i u^e - 2 a^(i+1) u^(e+1)) exp(-a u),
# so every derivative stays in this family.  The common factor exp(-pi u) of the
# n = 1 term is split off to keep ratios finite where Phi underflows.


@cache
def _phi_monomials(order: int) -> tuple[tuple[int, float, float], ...]:
    terms = {(2, 2.25): 2.0, (1, 1.25): -3.0}
    for _ in range(order):
        nxt: dict[tuple[int, float], float] = {}
        for (i, e), c in terms.items():
            nxt[(i, e)] = nxt.get((i, e), 0.0) + 2.0 * e * c
            nxt[(i + 1, e + 1)] = nxt.get((i + 1, e + 1), 0.0) - 2.0 * c
        terms = {k: v for k, v in nxt.items() if v != 0.0}
    return tuple((i, e, c) for (i, e), c in sorted(terms.items()))


def _phi_scaled_nonneg(x: np.ndarray, order: int, tol: EvalTolerances) -> np.ndarray:
    """exp(pi e^{2x}) * Phi^(order)(x) for x >= 0 (array)."""
    u = np.exp(2.0 * x)
    mono = _phi_monomials(order)
    total = np.zeros_like(x)
    for n in range(1, tol.max_terms + 1):
        a = math.pi * n * n
        damp = np.exp(-math.pi * (n * n - 1) * u)
        poly = sum(c * a**i * u**e for i, e, c in mono)
        term = poly * damp
        total = total + term
        if n >= 2 and np.all(np.abs(term) <= tol.series_term_cutoff * np.abs(total)):
            return total
    raise ConvergenceError(f"Phi series needs more than {tol.max_terms} terms")


def phi_kernel_array(x, order: int = 0, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """Phi or its ``order``-th derivative on an array, using evenness for x < 0.

    Values below the double-precision range underflow to 0; use
    :func:`phi_kernel` for a strictly positive arbitrary-precision value.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    scaled = _phi_scaled_nonneg(ax, order, tol)
    sign = np.where(x < 0, (-1.0) ** order, 1.0)
    if order % 2:
        sign = np.where(x == 0, 0.0, sign)  # odd derivatives of an even function
    with np.errstate(under="ignore"):
        return sign * np.exp(-math.pi * np.exp(2.0 * ax)) * scaled


def phi_log_derivative_array(x, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """Phi'(x)/Phi(x), finite even where Phi itself underflows."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    ratio = _phi_scaled_nonneg(ax, 1, tol) / _phi_scaled_nonneg(ax, 0, tol)
    return np.where(x < 0, -ratio, np.where(x == 0, 0.0, ratio))


def phi_second_log_derivative_array(x, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """Phi''(x)/Phi(x)."""
    ax = np.abs(np.asarray(x, dtype=float))
    return _phi_scaled_nonneg(ax, 2, tol) / _phi_scaled_nonneg(ax, 0, tol)


def _phi_direct_mp(x, order: int, tol: EvalTolerances, dps: int):
    """Direct (no evenness) series at any real x, in mpmath."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        u = mpmath.exp(2 * x)
        mono = _phi_monomials(order)
        total = mpmath.mpf(0)
        for n in range(1, tol.max_terms + 1):
            a = mpmath.pi * n * n
            term = sum(mpmath.mpf(c) * a**i * u ** mpmath.mpf(e) for i, e, c in mono) * mpmath.exp(-a * u)
            total += term
            if n >= 2 and abs(term) <= mpmath.mpf(10) ** (-dps + 3) * abs(total):
                return total
    raise ConvergenceError(f"direct Phi series at x={float(x)} needs more than {tol.max_terms} terms")


@cache
def verify_phi_evenness(points: tuple[float, ...] = (0.1, 0.3, 0.6), rtol: float = 1e-10) -> float:
    """Check Phi(-x) == Phi(x) by direct summation on both sides.

    Runs once per argument set; returns the worst relative deviation and
    raises ``NumericalError`` if it exceeds ``rtol``.
    """
    tol = EvalTolerances(max_terms=20000)
    worst = 0.0
    for x in points:
        plus = _phi_direct_mp(x, 0, tol, 40)
        minus = _phi_direct_mp(-x, 0, tol, 40)
        worst = max(worst, float(abs(plus - minus) / abs(plus)))
    if worst > rtol:
        raise NumericalError(f"Phi evenness check failed: relative deviation {worst:.3g}")
    return worst


def phi_kernel(x: float, tol: EvalTolerances = DEFAULT_TOL, x_min: float = -1.0, dps: int = 30):
    """Phi(x) as a strictly positive ``mpmath.mpf``.

    The return type is arbitrary precision because Phi drops below the
    smallest double already near x = 2.7 (Phi(3) ~ exp(-pi e^6)).
    Negative arguments down to ``x_min`` go through evenness, which is
    verified numerically on first use.
    """
    x = float(x)
    if x < x_min:
        raise DomainError(f"phi_kernel requires x >= {x_min}, got {x}")
    if x < 0:
        verify_phi_evenness()
    ax = abs(x)
    with mpmath.workdps(dps):
        u = mpmath.exp(2 * mpmath.mpf(ax))
        total = mpmath.mpf(0)
        mono = _phi_monomials(0)
        for n in range(1, tol.max_terms + 1):
            a = mpmath.pi * n * n
            term = sum(mpmath.mpf(c) * a**i * u ** mpmath.mpf(e) for i, e, c in mono) * mpmath.exp(-a * u)
            total += term
            if n >= 2 and abs(term) < tol.series_term_cutoff * abs(total):
                return +total
    raise ConvergenceError(f"Phi series at x={x} needs more than {tol.max_terms} terms")


# ---------------------------------------------------------------------------
# xi on the critical line


def xi_line_array(ps, eps: float = 0.0, tol: EvalTolerances = DEFAULT_TOL) -> np.ndarray:
    """Vectorised ``xi_line``."""
    eps = float(eps)
    if not abs(eps) <= 0.5:
        raise DomainError(f"xi_line requires |eps| <= 0.5, got {eps}")
    L = tol.half_width(PHI_HALF_WIDTH)
    return de_fourier(lambda x: phi_kernel_array(x, 0, tol), ps, eps, L, tol)


def xi_line(p: float, eps: float = 0.0, tol: EvalTolerances = DEFAULT_TOL) -> complex:
    """(1/sqrt(2pi)) int exp(-ipx) Phi(x) exp(-eps x) dx  (= xi(1/2+eps+ip) / (2 sqrt(2pi)))."""
    return complex(xi_line_array([p], eps, tol)[0])
