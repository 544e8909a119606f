import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from pytest import approx, mark, raises

from tests.strategies import ball_vectors, small_maps
from wcosym.errors import DenominatorVanishesAtOrigin, DimensionMismatch, NotInBall
from wcosym.maps.lfmap import LinearFractionalMap, affine_map, eval_map, identity_map
from wcosym.series.multi_index import count_monomials_leq, grlex_basis, multi_factorial, unit_index
from wcosym.series.power_series import (
    PowerSeries,
    compose_series,
    expand_log_reciprocal,
    expand_reciprocal_linear,
    map_component_series,
    series_arith,
    weight_series,
)
from wcosym.spaces.weights import Constant, KernelPower, NormalizedKernel


def z(j, dim=1, degree=4):
    return PowerSeries.variable(j, dim, degree)


class TestMultiIndex:
    def test_grlex_order(self):
        assert grlex_basis(2, 2) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))

    @mark.parametrize("dim,degree", [(1, 5), (2, 8), (3, 6)])
    def test_basis_size(self, dim, degree):
        assert len(grlex_basis(dim, degree)) == count_monomials_leq(dim, degree)

    def test_helpers(self):
        assert multi_factorial((2, 3)) == 12
        assert unit_index(3, 1) == (0, 1, 0)

    def test_invalid(self):
        with raises(ValueError):
            grlex_basis(0, 2)


class TestArithmetic:
    def test_difference_of_squares(self):
        one = PowerSeries.constant(1.0, 1, 2)
        x = PowerSeries.variable(0, 1, 2)
        product = series_arith("mul", one + x, one - x)
        assert product.allclose(PowerSeries.from_dict({(0,): 1, (2,): -1}, 1, 2))

    def test_binomial_square(self):
        s = PowerSeries.variable(0, 2, 2) + PowerSeries.variable(1, 2, 2)
        expected = PowerSeries.from_dict({(2, 0): 1, (1, 1): 2, (0, 2): 1}, 2, 2)
        assert series_arith("power", s, 2).allclose(expected)

    def test_telescoping_truncation(self):
        x = z(0)
        geometric = sum((x ** k for k in range(5)), PowerSeries.zero(1, 4))
        assert (geometric * (1 - x)).allclose(PowerSeries.constant(1.0, 1, 4))

    def test_scale_and_add(self):
        x = z(0)
        assert series_arith("scale", x, 3).coefficient((1,)) == 3
        assert series_arith("add", x, x, x).coefficient((1,)) == 3

    def test_incompatible(self):
        with raises(DimensionMismatch):
            PowerSeries.variable(0, 1, 2) + PowerSeries.variable(0, 1, 3)

    def test_coefficient_beyond_cap(self):
        assert z(0).coefficient((7,)) == 0

    def test_partial_and_truncate(self):
        p = PowerSeries.from_dict({(2, 1): 1.0, (0, 1): 2.0}, 2, 3)
        assert p.partial(0).to_dict() == {(1, 1): 2.0}
        assert p.partial(1).to_dict() == {(2, 0): 1.0, (0, 0): 2.0}
        assert p.truncate(1).to_dict() == {(0, 1): 2.0}
        assert p.homogeneous_part(3).to_dict() == {(2, 1): 1.0}

    @given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                    min_size=6, max_size=6),
           st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                    min_size=6, max_size=6),
           ball_vectors(2, 0.5))
    def test_product_evaluates_pointwise_at_low_degree(self, left, right, point):
        # 两个一次多项式的乘积在 D = 2 时没有被截掉的项
        p = PowerSeries(2, 2, left[:3] + [0, 0, 0])
        q = PowerSeries(2, 2, right[:3] + [0, 0, 0])
        assert (p * q).evaluate(point) == approx(p.evaluate(point) * q.evaluate(point), abs=1e-10)


class TestExpansions:
    def test_zero_vector(self):
        assert expand_reciprocal_linear([0, 0], 3, 4).allclose(PowerSeries.constant(1.0, 2, 4))
        assert expand_log_reciprocal([0, 0], 4).allclose(PowerSeries.zero(2, 4))

    def test_geometric(self):
        series = expand_reciprocal_linear([0.5], 1, 3)
        assert np.allclose(series.coeffs, [1, 0.5, 0.25, 0.125])

    def test_binomial(self):
        series = expand_reciprocal_linear([0.5, 0], 2, 1)
        assert series.allclose(PowerSeries.from_dict({(0, 0): 1, (1, 0): 1.0}, 2, 1))

    def test_conjugates_vector(self):
        assert expand_reciprocal_linear([0.5j], 1, 1).coefficient((1,)) == approx(-0.5j)

    def test_log(self):
        series = expand_log_reciprocal([0.5], 3)
        assert np.allclose(series.coeffs, [0, 0.5, 0.125, 0.125 / 3])

    def test_outside_ball(self):
        with raises(NotInBall):
            expand_reciprocal_linear([1.0, 0], 1, 2)
        assert expand_reciprocal_linear([2.0], 1, 2, formal=True).coefficient((2,)) == 4

    @given(ball_vectors(2, 0.6), ball_vectors(2, 0.5))
    def test_reciprocal_converges(self, c, point):
        series = expand_reciprocal_linear(c, 2, 40)
        exact = (1 - np.vdot(c, point)) ** -2
        assert series.evaluate(point) == approx(exact, abs=1e-8)


class TestMapSeries:
    def test_identity(self):
        parts = map_component_series(identity_map(2), 3)
        for j in range(2):
            assert parts[j].allclose(PowerSeries.variable(j, 2, 3))

    def test_disk_involution(self):
        phi = LinearFractionalMap([[-1.0]], [0.5], [-0.5], 1.0)
        series = map_component_series(phi, 2)[0]
        assert np.allclose(series.coeffs, [0.5, -0.75, -0.375])

    def test_affine_is_exact(self):
        sigma = affine_map([[0.2, 0.1], [0.0, 0.3j]], [0.1, 0.2])
        point = np.array([0.4, -0.2j])
        for j, part in enumerate(map_component_series(sigma, 1)):
            assert part.evaluate(point) == approx(eval_map(sigma, point)[j])

    def test_vanishing_at_origin(self):
        with raises(DenominatorVanishesAtOrigin):
            map_component_series(LinearFractionalMap([[0.0]], [1.0], [1.0], 0.0), 2)

    @given(small_maps(), ball_vectors(2, 0.3))
    def test_converges_to_map(self, phi, point):
        parts = map_component_series(phi, 24)
        image = eval_map(phi, point)
        for j in range(2):
            assert parts[j].evaluate(point) == approx(image[j], abs=1e-9)


class TestWeightSeries:
    def test_constant(self):
        assert weight_series(Constant(2 + 1j), 3, dim=2).allclose(PowerSeries.constant(2 + 1j, 2, 3))

    def test_kernel_power(self):
        series = weight_series(KernelPower(1.0, [0.5, 0], 2), 1)
        assert series.allclose(PowerSeries.from_dict({(0, 0): 1, (1, 0): 1}, 2, 1))

    def test_normalized_kernel(self):
        series = weight_series(NormalizedKernel(1.0, [0.5, 0], 2), 0)
        assert series.coefficient((0, 0)) == approx(0.75)

    def test_constant_needs_dimension(self):
        with raises(DimensionMismatch):
            weight_series(Constant(1.0), 2)

    def test_dimension_mismatch(self):
        with raises(DimensionMismatch):
            weight_series(KernelPower(1.0, [0.5, 0], 2), 2, dim=3)


class TestCompose:
    def test_compose_with_identity(self):
        outer = PowerSeries.from_dict({(0, 0): 1, (1, 0): 2, (1, 1): 3j}, 2, 3)
        inner = [PowerSeries.variable(j, 2, 3) for j in range(2)]
        assert compose_series(outer, inner).allclose(outer)

    def test_compose_with_linear_map(self):
        outer = PowerSeries.from_dict({(2,): 1.0}, 1, 3)
        inner = [PowerSeries.variable(0, 1, 3).scale(0.5)]
        assert compose_series(outer, inner).coefficient((2,)) == approx(0.25)

    def test_component_count(self):
        with raises(DimensionMismatch):
            compose_series(PowerSeries.zero(2, 2), [PowerSeries.zero(1, 2)])
