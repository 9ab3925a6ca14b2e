"""Exact expected characteristic polynomials of the (p,1) two-matrix model and certified real roots.

Polynomials live in ``flint.fmpq_poly`` and every root-counting decision is
made from exact signs.  Floating point appears only when root midpoints are
printed and in the optional eigenvalue cross-check of the (2,1) master matrix.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from flint import fmpq, fmpq_poly
from scipy.optimize import brentq

from .errors import ConfigError, DomainError, ResourceLimitError
from .wavefuncs import fmt_real

__all__ = [
    "ExactPolynomial",
    "ModelSpec",
    "RootSet",
    "ScalingRow",
    "MAX_N",
    "matrix_potential",
    "shifted_potential_coefficients",
    "qn_polynomial",
    "qn_sequence",
    "real_roots",
    "scaled_edge_compare",
    "scaling_to_csv",
    "quartic_edge_function",
    "quartic_edge_zero",
    "CrosscheckRow",
    "hermite_master_matrix",
    "monic_hermite",
    "master_matrix_crosscheck",
    "interlacing_check",
    "FIRST_AIRY_ZERO",
]

MAX_N = 1000
FIRST_AIRY_ZERO = 0.86336603209


def parse_rational(value) -> Fraction:
    """Accept Fraction, int, fmpq or an ``"a/b"`` string; floats are rejected to keep g exact."""
    if isinstance(value, fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, float):
        raise ConfigError("pass rationals as 'a/b' strings or Fraction, not float")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"not a rational number: {value!r}") from exc


def _q(x) -> fmpq:
    x = parse_rational(x)
    return fmpq(x.numerator, x.denominator)


def _frac(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _rat_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class ExactPolynomial:
    """Univariate polynomial in y with exact rational coefficients (index = degree)."""

    __slots__ = ("_poly",)

    def __init__(self, coefficients):
        if isinstance(coefficients, fmpq_poly):
            poly = coefficients
        else:
            poly = fmpq_poly([_q(c) for c in coefficients])
        if poly.is_zero():
            raise DomainError("the zero polynomial has no leading coefficient")
        self._poly = poly

    @property
    def flint(self) -> fmpq_poly:
        return self._poly

    @property
    def degree(self) -> int:
        return self._poly.degree()

    @property
    def coefficients(self) -> list[Fraction]:
        return [_frac(c) for c in self._poly.coeffs()]

    @property
    def is_monic(self) -> bool:
        return self._poly.leading_coefficient() == 1

    def __call__(self, y) -> Fraction:
        return _frac(self._poly(_q(y)))

    def __eq__(self, other):
        return isinstance(other, ExactPolynomial) and self._poly == other._poly

    def __hash__(self):
        return hash(tuple(self.coefficients))

    def __repr__(self):
        return f"ExactPolynomial({self.text()!r})"

    def text(self, var: str = "y") -> str:
        """Human-readable form, highest degree first, e.g. ``"y^2 + 6*y + 15/2"``."""
        parts = []
        for k in range(self.degree, -1, -1):
            c = _frac(self._poly[k])
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                body = _rat_str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_rat_str(mag)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_dict(self) -> dict:
        return {
            "type": "ExactPolynomial",
            "variable": "y",
            "degree": self.degree,
            "coefficients": [_rat_str(c) for c in self.coefficients],
            "text": self.text(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "ExactPolynomial":
        return cls([Fraction(c) for c in data["coefficients"]])

    @classmethod
    def from_json(cls, text: str) -> "ExactPolynomial":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ModelSpec:
    p_order: int
    N: int
    g: Fraction

    def __post_init__(self):
        object.__setattr__(self, "g", parse_rational(self.g))
        if int(self.p_order) != self.p_order or self.p_order < 2:
            raise DomainError("p_order must be an integer >= 2")
        if int(self.N) != self.N or self.N < 0:
            raise DomainError("N must be a non-negative integer")
        if self.g <= 0:
            raise DomainError("g must be > 0")

    @classmethod
    def scaling(cls, p_order: int, N: int) -> "ModelSpec":
        """Coupling tied to the matrix size, g = 1/N."""
        return cls(p_order, N, Fraction(1, N))


def matrix_potential(p_order: int, a) -> Fraction:
    """V_p(a) = -sum_{k=1}^p (a^k - 1)/k, exactly."""
    a = parse_rational(a)
    return -sum((a**k - 1) / k for k in range(1, p_order + 1))


def shifted_potential_coefficients(p_order: int) -> list[Fraction]:
    """Coefficients c_0..c_p of V_p(z + 1) as a polynomial in z (c_0 = V_p(1) = 0)."""
    coeffs = [Fraction(0)] * (p_order + 1)
    for k in range(1, p_order + 1):
        # -(z+1)^k / k, the constant 1/k cancels against c_0
        for j in range(k + 1):
            coeffs[j] -= Fraction(math.comb(k, j), k)
        coeffs[0] += Fraction(1, k)
    return coeffs


def qn_sequence(spec: ModelSpec, time_budget: float | None = None, max_n: int = MAX_N) -> list[ExactPolynomial]:
    """Q_0, ..., Q_N for the given model.

    Uses the power-series exponential recurrence for
    (-g)^n n! [z^n] exp((V_p(z+1) - y z)/g):

        q_n = sum_k k c_k (-1)^k g^(k-1) (n-1)!/(n-k)! q_{n-k}

    with c_k the shifted potential coefficients and -y added to c_1.
    """
    if spec.N > max_n:
        raise ResourceLimitError(f"N = {spec.N} exceeds the configured maximum {max_n}", completed=0)
    g = _q(spec.g)
    y = fmpq_poly([0, 1])
    shifted = shifted_potential_coefficients(spec.p_order)
    c = [fmpq_poly([_q(v)]) for v in shifted]
    c[1] = c[1] - y
    # fixed factors k c_k (-1)^k g^(k-1)
    weights = [None] + [c[k] * (k * (-1) ** k) * g ** (k - 1) for k in range(1, spec.p_order + 1)]
    qs = [fmpq_poly([1])]
    start = time.monotonic()
    for n in range(1, spec.N + 1):
        acc = fmpq_poly([])
        falling = 1  # (n-1)!/(n-k)!
        for k in range(1, min(spec.p_order, n) + 1):
            if k > 1:
                falling *= n - k + 1
            acc += weights[k] * falling * qs[n - k]
        qs.append(acc)
        if time_budget is not None and time.monotonic() - start > time_budget:
            raise ResourceLimitError(
                f"time budget of {time_budget:g} s exhausted after Q_{n} of Q_{spec.N}", completed=n)
    return [ExactPolynomial(q) for q in qs]


def qn_polynomial(spec: ModelSpec, time_budget: float | None = None, max_n: int = MAX_N) -> ExactPolynomial:
    """Expected characteristic polynomial Q_N(y); monic of degree N."""
    q = qn_sequence(spec, time_budget, max_n)[-1]
    assert q.is_monic and q.degree == spec.N
    return q


# ---------------------------------------------------------------------------
# certified real roots


@dataclass
class RootSet:
    intervals: list[tuple[Fraction, Fraction]]
    midpoints: list[mpmath.mpf]
    all_real: bool
    degree: int
    precision_digits: int = 20
    multiplicities: list[int] = field(default_factory=list)

    def __post_init__(self):
        if len(self.intervals) > self.degree:
            raise ConfigError("more roots than the degree allows")
        for (a, b), (c, _) in zip(self.intervals, self.intervals[1:]):
            if not b < c and not (a == b == c):
                raise ConfigError("isolating intervals must be disjoint and ordered")
        if not self.multiplicities:
            self.multiplicities = [1] * len(self.intervals)

    @property
    def count(self) -> int:
        return len(self.intervals)

    def as_floats(self) -> np.ndarray:
        return np.array([float(m) for m in self.midpoints])

    def _mid_str(self, m) -> str:
        return mpmath.nstr(m, self.precision_digits, strip_zeros=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "midpoint", "width"])
        for i, ((a, b), m) in enumerate(zip(self.intervals, self.midpoints)):
            w.writerow([i, self._mid_str(m), fmt_real(float(b - a))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "type": "RootSet",
            "degree": self.degree,
            "all_real": self.all_real,
            "precision_digits": self.precision_digits,
            "intervals": [[_rat_str(a), _rat_str(b)] for a, b in self.intervals],
            "midpoints": [self._mid_str(m) for m in self.midpoints],
            "multiplicities": self.multiplicities,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RootSet":
        d = json.loads(text)
        with mpmath.workdps(d["precision_digits"] + 10):
            mids = [mpmath.mpf(m) for m in d["midpoints"]]
        return cls([(Fraction(a), Fraction(b)) for a, b in d["intervals"]], mids, d["all_real"], d["degree"],
                   d["precision_digits"], d["multiplicities"])


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _log_abs(x: fmpq) -> float:
    return math.log(abs(int(x.p))) - math.log(int(x.q))


def _root_bound_exponent(poly: fmpq_poly) -> int:
    """k with every root strictly inside (-2^k, 2^k) (Fujiwara bound, computed in logs)."""
    d = poly.degree()
    lead = _log_abs(poly[d])
    best = -math.inf
    for i in range(1, d + 1):
        c = poly[d - i]
        if c == 0:
            continue
        t = (_log_abs(c) - lead) / i
        if i == d:
            t -= math.log(2) / d
        best = max(best, t)
    if best == -math.inf:
        return 1
    return max(1, math.ceil((best + math.log(2)) / math.log(2)) + 1)


def _sturm_chain(poly: fmpq_poly) -> list[fmpq_poly]:
    chain = [poly, poly.derivative()]
    while chain[-1].degree() > 0:
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    return chain


def _sign_variations(chain, x: fmpq) -> int:
    signs = [s for s in (_sign(p(x)) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sturm_isolate(poly: fmpq_poly, lo: fmpq, hi: fmpq) -> list[tuple[fmpq, fmpq]]:
    """Classical Sturm bisection on (lo, hi]; exact rational roots come back as zero-width intervals."""
    chain = _sturm_chain(poly)

    def var(x):
        return _sign_variations(chain, x)

    out = []
    stack = [(lo, hi, var(lo) - var(hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        if poly(m) != 0:
            vm = var(m)
            stack.append((a, m, var(a) - vm))
            stack.append((m, b, vm - var(b)))
            continue
        out.append((m, m))
        vm = var(m)
        # step off the exact root until no other root sits between
        left, right = m - (m - a) / 2, m + (b - m) / 2
        while poly(left) == 0 or var(left) - vm != 1:
            left = m - (m - left) / 2
        while poly(right) == 0 or vm - var(right) != 0:
            right = m + (right - m) / 2
        stack.append((a, left, var(a) - var(left)))
        stack.append((right, b, var(right) - var(b)))
    return sorted(out)


def _no_roots_above(poly: fmpq_poly, u: fmpq) -> bool:
    """Descartes: p(x + u) with no coefficient sign change has no root in (u, inf)."""
    shifted = poly(fmpq_poly([u, 1]))
    signs = [s for s in (_sign(c) for c in shifted.coeffs()) if s]
    return shifted[0] != 0 and all(s == signs[0] for s in signs)


def _tight_bounds(poly: fmpq_poly, steps: int = 14) -> tuple[fmpq, fmpq]:
    """Dyadic (lo, hi) with every real root strictly inside, tightened by bisection on a Descartes test."""
    k = _root_bound_exponent(poly)
    outer = fmpq(2**k)
    mirrored = poly(fmpq_poly([0, -1]))
    bounds = []
    for p in (poly, mirrored):
        safe, unsafe = outer, -outer
        for _ in range(steps):
            mid = (safe + unsafe) / 2
            if _no_roots_above(p, mid):
                safe = mid
            else:
                unsafe = mid
        bounds.append(safe)
    return -bounds[1], bounds[0]


def _dyadic_scan(poly: fmpq_poly, max_points: int):
    """Try to certify all roots real by counting sign changes on dyadic grids.

    Returns (intervals, exact_roots) on success, None when the finest grid
    still shows fewer than ``degree`` sign changes.
    """
    d = poly.degree()
    lo, hi = _tight_bounds(poly)
    span = hi - lo
    points = 1 << max(4, math.ceil(math.log2(4 * d + 1)))
    while points <= max_points:
        xs = [lo + span * fmpq(j, points) for j in range(points + 1)]
        vals = [poly(x) for x in xs]
        exact = [x for x, v in zip(xs, vals) if v == 0]
        if exact:
            return None, exact
        intervals = [(xs[j], xs[j + 1]) for j in range(points) if _sign(vals[j]) != _sign(vals[j + 1])]
        if len(intervals) == d:
            return intervals, []
        points *= 2
    return None, []


def _refine(poly: fmpq_poly, a: fmpq, b: fmpq, width: fmpq) -> tuple[fmpq, fmpq]:
    if a == b:
        return a, b
    sa = _sign(poly(a))
    while b - a > width:
        m = (a + b) / 2
        sm = _sign(poly(m))
        if sm == 0:
            return m, m
        if sm == sa:
            a = m
        else:
            b = m
    return a, b


def real_roots(poly: ExactPolynomial, precision_digits: int = 20, method: str = "auto",
               max_scan_points: int = 1 << 16) -> RootSet:
    """Isolate and refine the real roots of ``poly`` with exact sign arithmetic.

    The squarefree part is taken first.  ``method="auto"`` scans dyadic grids
    until the number of strict sign changes equals the degree, which certifies
    that every root is real and simple.  If the scan cannot certify, a Sturm
    sequence counts and isolates whatever real roots exist.  ``method="sturm"``
    skips the scan.
    """
    if method not in ("auto", "sturm"):
        raise ConfigError("method must be 'auto' or 'sturm'")
    if precision_digits < 1:
        raise ConfigError("precision_digits must be positive")
    full = poly.flint
    if full.degree() < 1:
        return RootSet([], [], True, 0, precision_digits)
    sqf = full // full.gcd(full.derivative())
    exact_roots: list[fmpq] = []
    work = sqf
    intervals = None
    if method == "auto":
        while work.degree() > 0:
            intervals, found = _dyadic_scan(work, max_scan_points)
            if not found:
                break
            for r in found:
                exact_roots.append(r)
                work = work // fmpq_poly([-r, 1])
            intervals = None
        if work.degree() == 0:
            intervals = []
    if intervals is None:
        lo, hi = _tight_bounds(work)
        intervals = _sturm_isolate(work, lo, hi)
    width = fmpq(1, 10**precision_digits)
    refined = [_refine(work, a, b, width) for a, b in intervals]
    refined += [(r, r) for r in exact_roots]
    refined.sort(key=lambda ab: ab[0])
    with mpmath.workdps(precision_digits + 10):
        mids = [mpmath.mpf(int(((a + b) / 2).p)) / int(((a + b) / 2).q) for a, b in refined]
    _, factors = full.factor_squarefree()
    mults = []
    for a, b in refined:
        for f, e in factors:
            sa, sb = _sign(f(a)), _sign(f(b))
            if sa == 0 or sb == 0 or sa != sb:
                mults.append(e)
                break
        else:
            mults.append(1)
    all_real = sum(mults) == full.degree()
    frac_intervals = [(_frac(a), _frac(b)) for a, b in refined]
    return RootSet(frac_intervals, mids, all_real, full.degree(), precision_digits, mults)


# ---------------------------------------------------------------------------
# scaling limit


@dataclass
class ScalingRow:
    N: int
    nearest_roots: list[float]
    mapped_roots: list[float]
    distance: float
    edge_distance: float
    all_real: bool


def quartic_edge_function(y: float, dps: int = 30) -> float:
    """Im[e^(i pi/4) int_0^inf exp(-s^4/4 - y e^(i pi/4) s) ds].

    Steepest-descent form of the large-N limit of Q_N near y = 0 for the
    (3,1) model: the saddle of the contour integral sits at a triple point,
    which leaves a quartic exponent integrated along the rays arg w = +-pi/4.
    It solves psi''' = -y psi.
    """
    with mpmath.workdps(dps):
        rot = mpmath.exp(1j * mpmath.pi / 4)
        val = mpmath.quad(lambda s: mpmath.exp(-s**4 / 4 - y * rot * s), [0, mpmath.inf])
        return float(mpmath.im(rot * val))


@lru_cache(maxsize=None)
def quartic_edge_zero() -> float:
    """Largest zero of ``quartic_edge_function`` (about -2.8868)."""
    return float(brentq(quartic_edge_function, -3.5, -2.0, xtol=1e-14))


def scaled_edge_compare(N_list, p_order: int = 3, cluster: int = 4,
                        target: float = FIRST_AIRY_ZERO) -> tuple[list[ScalingRow], bool]:
    """Map the roots of Q_N (g = 1/N) nearest y = 0 by y -> N^(3/4) y and compare to ``target``.

    ``distance`` is ||y~| - target| for the mapped root of smallest
    magnitude.  ``edge_distance`` compares the same root with the first zero
    of ``quartic_edge_function``, which is where the mapped edge actually
    accumulates (only defined for p_order = 3).  Returns the rows and whether
    ``distance`` decreases strictly along ``N_list``; the rows keep the whole
    nearest cluster so the observed edge is always visible.
    """
    N_list = [int(n) for n in N_list]
    if N_list != sorted(N_list) or len(set(N_list)) != len(N_list):
        raise ConfigError("N_list must be strictly ascending")
    edge = quartic_edge_zero() if p_order == 3 else math.nan
    rows = []
    for n in N_list:
        roots = real_roots(qn_polynomial(ModelSpec.scaling(p_order, n)), precision_digits=15)
        vals = roots.as_floats()
        order = np.argsort(np.abs(vals))[:cluster]
        near = np.sort(vals[order])
        mapped = near * n**0.75
        first = float(mapped[np.argmin(np.abs(mapped))])
        rows.append(ScalingRow(n, near.tolist(), mapped.tolist(), abs(abs(first) - target), abs(first - edge),
                               roots.all_real))
    dists = [r.distance for r in rows]
    return rows, all(b < a for a, b in zip(dists, dists[1:]))


def scaling_to_csv(rows: list[ScalingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "first_mapped_root", "distance_to_target", "distance_to_edge_zero", "mapped_cluster"])
    for r in rows:
        first = min(r.mapped_roots, key=abs)
        w.writerow([r.N, fmt_real(first), fmt_real(r.distance), fmt_real(r.edge_distance),
                    " ".join(fmt_real(v) for v in r.mapped_roots)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# (2,1) model


def hermite_master_matrix(N: int) -> np.ndarray:
    """N x N symmetric tridiagonal matrix with off-diagonal entries sqrt(k/2), k = 1..N-1."""
    if N < 1:
        raise DomainError("N must be >= 1")
    off = np.sqrt(np.arange(1, N) / 2.0)
    return np.diag(off, 1) + np.diag(off, -1)


def monic_hermite(N: int) -> fmpq_poly:
    """Monic physicists' Hermite polynomial H_N(t)/2^N, by h_{n+1} = t h_n - (n/2) h_{n-1}."""
    t = fmpq_poly([0, 1])
    prev, cur = fmpq_poly([1]), t
    if N == 0:
        return prev
    for n in range(1, N):
        prev, cur = cur, t * cur - fmpq(n, 2) * prev
    return cur


def _hermite_side(N: int, g: Fraction) -> fmpq_poly:
    """(g/2)^(N/2) H_N((y+2)/sqrt(2g)) = (2g)^(N/2) h_N((y+2)/sqrt(2g)), built over Q."""
    h = monic_hermite(N)
    two_g = _q(2 * g)
    # only monomials with N - j even survive, so the square roots cancel
    in_u = fmpq_poly([h[j] * two_g ** ((N - j) // 2) if (N - j) % 2 == 0 else 0 for j in range(N + 1)])
    return in_u(fmpq_poly([2, 1]))


@dataclass
class CrosscheckRow:
    N: int
    exact_match: bool
    eigen_max_error: float


def master_matrix_crosscheck(N_max: int, g=None) -> list[CrosscheckRow]:
    """Check Q_N^(2,1) against the scaled Hermite polynomial for N = 1..N_max.

    The exact comparison is rational; the numeric column compares the master
    matrix eigenvalues, mapped by y = -2 + sqrt(2g) t, to certified roots of Q_N.
    ``g`` defaults to 1/N per row.
    """
    if not 1 <= N_max <= 50:
        raise ConfigError("the master-matrix crosscheck supports 1 <= N <= 50")
    rows = []
    fixed_g = None if g is None else parse_rational(g)
    for n in range(1, N_max + 1):
        gn = fixed_g if fixed_g is not None else Fraction(1, n)
        q = qn_polynomial(ModelSpec(2, n, gn))
        match = q.flint == _hermite_side(n, gn)
        eig = np.sort(np.linalg.eigvalsh(hermite_master_matrix(n)))
        mapped = -2.0 + math.sqrt(2 * gn) * eig
        roots = real_roots(q, precision_digits=17).as_floats()
        err = float(np.max(np.abs(mapped - roots))) if len(roots) == n else math.inf
        rows.append(CrosscheckRow(n, match, err))
    return rows


def interlacing_check(p_order: int, N: int, g=None) -> bool:
    """Exact test that the roots of Q_{N-1} separate those of Q_N.

    Q_N is evaluated at both endpoints of shrinking isolating intervals of
    the Q_{N-1} roots; the signs must alternate with one Q_N root below the
    first and one above the last.
    """
    if N < 2:
        raise ConfigError("interlacing needs N >= 2")
    gn = parse_rational(g) if g is not None else Fraction(1, N)
    seq = qn_sequence(ModelSpec(p_order, N, gn))
    qn, qm = seq[N].flint, seq[N - 1].flint
    if qn.gcd(qm).degree() > 0:
        return False
    lower = real_roots(seq[N - 1], precision_digits=6)
    if not lower.all_real or lower.count != N - 1:
        return False
    signs = []
    for a, b in lower.intervals:
        a, b = _q(a), _q(b)
        for _ in range(200):
            sa, sb = _sign(qn(a)), _sign(qn(b))
            if sa == sb != 0:
                break
            a, b = _refine(qm, a, b, (b - a) / 4)
        else:
            return False
        signs.append(sa)
    expected_first = (-1) ** (N - 1)
    return signs[0] == expected_first and all(s != t for s, t in zip(signs, signs[1:]))
