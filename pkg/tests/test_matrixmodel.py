import json
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from zetaqft.errors import ConfigError, DomainError, ResourceLimitError
from zetaqft.matrixmodel import (
    ExactPolynomial,
    ModelSpec,
    RootSet,
    hermite_master_matrix,
    interlacing_check,
    master_matrix_crosscheck,
    matrix_potential,
    parse_rational,
    qn_polynomial,
    qn_sequence,
    quartic_edge_function,
    quartic_edge_zero,
    real_roots,
    scaled_edge_compare,
    scaling_to_csv,
    shifted_potential_coefficients,
)


def differentiation_oracle(p_order, N, g):
    """(-g d/dz)^N exp((V_p(z+1) - y z)/g) at z = 0, by direct symbolic differentiation."""
    y, z = sympy.symbols("y z")
    g = sympy.Rational(g.numerator, g.denominator)
    a = z + 1
    v = -sum((a**k - 1) / sympy.Integer(k) for k in range(1, p_order + 1))
    expr = sympy.exp((v - y * z) / g)
    for _ in range(N):
        expr = -g * sympy.diff(expr, z)
    poly = sympy.Poly(sympy.expand(expr.subs(z, 0)), y)
    coeffs = poly.all_coeffs()[::-1]
    return [Fraction(int(c.p), int(c.q)) for c in coeffs]


class TestRationals:
    @pytest.mark.parametrize("text,value", [("1/2", Fraction(1, 2)), ("3", Fraction(3)), ("0.125", Fraction(1, 8)),
                                            (Fraction(2, 7), Fraction(2, 7)), (5, Fraction(5))])
    def test_parse(self, text, value):
        assert parse_rational(text) == value

    @pytest.mark.parametrize("bad", [0.5, "x/2", "1/0"])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            parse_rational(bad)


class TestPotential:
    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_vanishes_at_one(self, p):
        assert matrix_potential(p, 1) == 0

    def test_quadratic_at_zero(self):
        assert matrix_potential(2, 0) == Fraction(3, 2)

    def test_cubic_shift(self):
        assert shifted_potential_coefficients(3) == [0, -3, Fraction(-3, 2), Fraction(-1, 3)]

    def test_shift_matches_direct(self):
        for a in (Fraction(-2), Fraction(1, 3), Fraction(5, 2)):
            c = shifted_potential_coefficients(4)
            assert sum(ck * a**k for k, ck in enumerate(c)) == matrix_potential(4, a + 1)


class TestQnPolynomial:
    def test_zeroth(self):
        assert qn_polynomial(ModelSpec(3, 0, Fraction(1, 2))).coefficients == [1]

    def test_first(self):
        assert qn_polynomial(ModelSpec(3, 1, "1/2")).text() == "y + 3"

    @pytest.mark.parametrize("g", [Fraction(1, 2), Fraction(1, 7), Fraction(3)])
    def test_second(self, g):
        q = qn_polynomial(ModelSpec(3, 2, g))
        assert q.coefficients == [9 - 3 * g, 6, 1]

    @pytest.mark.parametrize("p", [2, 3, 4])
    @pytest.mark.parametrize("N", range(1, 7))
    def test_matches_symbolic_differentiation(self, p, N):
        g = Fraction(1, N + 1)
        assert qn_polynomial(ModelSpec(p, N, g)).coefficients == differentiation_oracle(p, N, g)

    @pytest.mark.parametrize("p,N", [(2, 13), (3, 40), (5, 17)])
    def test_monic(self, p, N):
        q = qn_polynomial(ModelSpec(p, N, Fraction(2, 3)))
        assert q.is_monic and q.degree == N

    def test_value_at_origin(self):
        q = qn_polynomial(ModelSpec.scaling(3, 9))
        assert q(0) == q.coefficients[0]

    def test_sequence_is_prefix_consistent(self):
        seq = qn_sequence(ModelSpec(3, 8, "1/3"))
        assert seq[5] == qn_polynomial(ModelSpec(3, 5, "1/3"))

    def test_max_n(self):
        with pytest.raises(ResourceLimitError):
            qn_polynomial(ModelSpec(3, 20, "1/2"), max_n=10)

    def test_time_budget_reports_progress(self):
        with pytest.raises(ResourceLimitError) as info:
            qn_polynomial(ModelSpec.scaling(3, 600), time_budget=0.0)
        assert info.value.completed >= 1

    @pytest.mark.parametrize("p,N,g", [(1, 3, 1), (3, -1, 1), (3, 2, 0)])
    def test_invalid_spec(self, p, N, g):
        with pytest.raises(DomainError):
            ModelSpec(p, N, g)

    def test_json_round_trip(self):
        q = qn_polynomial(ModelSpec(3, 4, "2/5"))
        data = json.loads(q.to_json())
        assert all(isinstance(c, str) for c in data["coefficients"])
        assert ExactPolynomial.from_json(q.to_json()) == q

    def test_text(self):
        assert qn_polynomial(ModelSpec(3, 2, "1/2")).text() == "y^2 + 6*y + 15/2"


class TestRealRoots:
    def test_linear(self):
        rs = real_roots(ExactPolynomial([3, 1]))
        assert rs.all_real and rs.count == 1 and rs.as_floats()[0] == -3.0

    def test_quadratic(self):
        rs = real_roots(qn_polynomial(ModelSpec(3, 2, "1/2")), precision_digits=25)
        assert rs.all_real
        with mpmath.workdps(40):
            ref = [-3 - mpmath.sqrt(1.5), -3 + mpmath.sqrt(1.5)]
            assert all(abs(a - b) < mpmath.mpf(10) ** -24 for a, b in zip(rs.midpoints, ref))

    def test_complex_pair_not_certified(self):
        rs = real_roots(ExactPolynomial([1, 0, 1]))
        assert rs.count == 0 and not rs.all_real

    def test_mixed(self):
        # (y^2 + 1)(y - 2)(y + 1/3)
        rs = real_roots(ExactPolynomial([Fraction(-2, 3), Fraction(-5, 3), Fraction(1, 3), Fraction(-5, 3), 1]))
        assert rs.count == 2 and not rs.all_real
        assert rs.as_floats() == pytest.approx([-1 / 3, 2.0], abs=1e-15)

    def test_repeated_root(self):
        rs = real_roots(ExactPolynomial([4, -4, 1]))  # (y - 2)^2
        assert rs.all_real and rs.multiplicities == [2]

    @pytest.mark.parametrize("method", ["auto", "sturm"])
    def test_irrational_roots(self, method):
        # y^3 - 2y has the exact root 0 between two irrational ones
        rs = real_roots(ExactPolynomial([0, -2, 0, 1]), precision_digits=30, method=method)
        assert rs.all_real
        with mpmath.workdps(40):
            ref = [-mpmath.sqrt(2), 0, mpmath.sqrt(2)]
            assert all(abs(a - b) < mpmath.mpf(10) ** -29 for a, b in zip(rs.midpoints, ref))

    def test_intervals_disjoint_and_bracketing(self):
        q = qn_polynomial(ModelSpec.scaling(3, 30))
        rs = real_roots(q, precision_digits=12)
        for (a, b), (c, _) in zip(rs.intervals, rs.intervals[1:]):
            assert b < c
        for a, b in rs.intervals:
            assert a == b or q(a) * q(b) < 0

    def test_round_trip(self):
        rs = real_roots(qn_polynomial(ModelSpec.scaling(3, 6)))
        back = RootSet.from_json(rs.to_json())
        assert back.intervals == rs.intervals and back.all_real
        assert rs.to_csv().splitlines()[0] == "index,midpoint,width"

    def test_matches_multiprecision_polyroots(self):
        q = qn_polynomial(ModelSpec.scaling(3, 12))
        with mpmath.workdps(60):
            ref = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(q.coefficients)],
                                   maxsteps=200, extraprec=200)
            ref = sorted(float(mpmath.re(r)) for r in ref)
        assert real_roots(q).as_floats() == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("N", [50, 100])
    def test_all_real(self, N):
        rs = real_roots(qn_polynomial(ModelSpec.scaling(3, N)))
        assert rs.all_real and rs.count == N
        assert np.all(rs.as_floats() < 0)

    def test_all_real_200(self):
        start = time.monotonic()
        rs = real_roots(qn_polynomial(ModelSpec.scaling(3, 200)))
        assert rs.all_real and rs.count == 200
        assert time.monotonic() - start < 600


class TestScaling:
    def test_trend_and_edge(self):
        rows, decreasing = scaled_edge_compare([25, 50, 100])
        assert decreasing
        assert all(r.all_real for r in rows)
        edge = [r.edge_distance for r in rows]
        assert edge[0] > edge[1] > edge[2]
        assert scaling_to_csv(rows).splitlines()[0].startswith("N,first_mapped_root")

    def test_edge_function_zero(self):
        z = quartic_edge_zero()
        assert z == pytest.approx(-2.8868, abs=1e-4)
        assert abs(quartic_edge_function(z)) < 1e-12

    def test_edge_function_ode(self):
        # psi''' = -y psi, checked by a 7-point stencil
        h = 1e-2
        ys = -1.0 + h * np.arange(-3, 4)
        f = np.array([quartic_edge_function(v) for v in ys])
        d3 = (f[0] - 8 * f[1] + 13 * f[2] - 13 * f[4] + 8 * f[5] - f[6]) / (8 * h**3)
        assert d3 == pytest.approx(1.0 * f[3], abs=1e-5)

    def test_prefactor_never_vanishes(self):
        # mapped roots are the zeros of the rescaled function, since exp never vanishes
        rows, _ = scaled_edge_compare([10])
        q = qn_polynomial(ModelSpec.scaling(3, 10))
        for yt in rows[0].mapped_roots:
            y = yt / 10**0.75
            assert abs(float(q(Fraction(y)))) < 1e-9 * math.exp(-yt * 10**0.25)

    def test_ascending_required(self):
        with pytest.raises(ConfigError):
            scaled_edge_compare([50, 25])


class TestMasterMatrix:
    def test_two_by_two(self):
        m = hermite_master_matrix(2)
        assert m[0, 1] == pytest.approx(1 / math.sqrt(2))
        assert np.poly(m) == pytest.approx([1, 0, -0.5])

    def test_symmetric_spectrum(self):
        ev = np.linalg.eigvalsh(hermite_master_matrix(6))
        assert np.allclose(np.sort(ev), np.sort(-ev), atol=1e-12)

    def test_first_two(self):
        g = Fraction(1, 3)
        assert qn_polynomial(ModelSpec(2, 1, g)).coefficients == [2, 1]
        assert qn_polynomial(ModelSpec(2, 2, g)).coefficients == [4 - g, 4, 1]

    def test_identity_up_to_ten(self):
        rows = master_matrix_crosscheck(10)
        assert all(r.exact_match for r in rows)
        assert max(r.eigen_max_error for r in rows) < 1e-12

    def test_fixed_coupling(self):
        assert all(r.exact_match for r in master_matrix_crosscheck(8, g="2/3"))

    def test_bounds(self):
        with pytest.raises(ConfigError):
            master_matrix_crosscheck(51)

    @pytest.mark.parametrize("N", [2, 8, 15])
    def test_hermite_interlacing(self, N):
        assert interlacing_check(2, N)
