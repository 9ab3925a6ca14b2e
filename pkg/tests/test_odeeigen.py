import math

import numpy as np
import pytest
from scipy.special import airy, gamma

from zetaqft.errors import ConfigError, WindowExhaustedError
from zetaqft.odeeigen import (
    EigenTable,
    eigen_relation_residual,
    eigen_zero_table,
    eigenfunction,
    eigenfunction_samples,
    ode_residual,
    semiclassical_estimates,
    standard_airy,
    standard_airy_first_zero,
)
from zetaqft.specialfn import generalized_airy


@pytest.fixture(scope="module")
def table():
    return eigen_zero_table(7)


class TestOdeResidual:
    def test_fine_grid(self):
        res, norm = ode_residual(dx=5e-3)
        assert res < 1e-6 * norm

    def test_fourth_order(self):
        coarse, _ = ode_residual(dx=1e-2)
        fine, _ = ode_residual(dx=5e-3)
        assert 12 < coarse / fine < 20

    def test_origin(self):
        res, _ = ode_residual(window=(-0.03, 0.03), dx=1e-2)
        assert res < 1e-5


class TestZeroTable:
    def test_published_zeros(self, table):
        assert table.zeros[0] == pytest.approx(0.86336603209, abs=1e-6)
        assert table.zeros[1] == pytest.approx(1.696081937, abs=1e-6)

    def test_increasing_and_exact(self, table):
        assert len(table.zeros) == 7
        assert all(b > a for a, b in zip(table.zeros, table.zeros[1:]))
        assert max(abs(generalized_airy(z)) for z in table.zeros) < 1e-10

    def test_twelve(self):
        t = eigen_zero_table(12)
        assert len(t.zeros) == 12 and t.zeros[-1] < 16

    def test_count_bounds(self):
        with pytest.raises(ConfigError):
            eigen_zero_table(13)

    def test_window_exhausted(self):
        with pytest.raises(WindowExhaustedError):
            eigen_zero_table(7, p_max=3.0, step=1.5)

    def test_round_trip(self, table):
        assert EigenTable.from_json(table.to_json()) == table
        assert table.to_csv().splitlines()[0] == "n,zero,semiclassical,rel_error"

    def test_unsorted_rejected(self):
        with pytest.raises(ConfigError):
            EigenTable([2.0, 1.0], [1.0, 2.0], [0.0, 0.0])


class TestEigenfunctions:
    def test_value_at_shift(self, table):
        for n in range(7):
            assert eigenfunction(n, table.zeros[n], table)[0] == pytest.approx(1 / gamma(0.75), rel=1e-13)

    def test_shifted_zeros(self, table):
        for m in range(3):
            assert abs(eigenfunction(2, table.zeros[2] + table.zeros[m], table)[0]) < 1e-9

    def test_samples_match_recomputation(self, table):
        curve = eigenfunction_samples(0, table, n_points=21)
        ref = [generalized_airy(p - table.zeros[0]).real for p in curve.coordinates]
        assert np.allclose(curve.values.real, ref, atol=1e-14)
        assert curve.coordinates[0] == pytest.approx(table.zeros[0] - 2)

    def test_index_bounds(self, table):
        with pytest.raises(ConfigError):
            eigenfunction_samples(7, table)

    @pytest.mark.parametrize("n", [0, 3, 6])
    def test_eigen_relation(self, table, n):
        res, norm = eigen_relation_residual(n, table)
        assert res < 1e-7 * norm


class TestSemiclassical:
    def test_formulas(self):
        assert semiclassical_estimates(1)[0] == pytest.approx((math.pi / 4) ** 0.75)
        assert semiclassical_estimates(1, "airy")[0] == pytest.approx((9 * math.pi / 8) ** (2 / 3))

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            semiclassical_estimates(3, "wkb")

    def test_standard_airy_quadrature(self):
        for x in (-4.0, -1.0, 0.0, 1.5):
            assert standard_airy(x) == pytest.approx(airy(x)[0], abs=1e-12)

    def test_standard_airy_zero(self):
        assert standard_airy_first_zero() == pytest.approx(2.338107410459767, abs=1e-10)

    def test_generalized_less_accurate(self, table):
        airy_zero = standard_airy_first_zero()
        airy_err = abs(semiclassical_estimates(1, "airy")[0] - airy_zero) / airy_zero
        assert table.relative_errors[0] > airy_err

    def test_errors_bounded(self, table):
        # observed to grow slowly with n; only boundedness is asserted
        assert max(table.relative_errors) < 0.10
