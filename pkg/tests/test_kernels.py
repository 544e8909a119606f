import math
from fractions import Fraction

import numpy as np
from hypothesis import given
from pytest import approx, mark, raises

from tests.strategies import ball_vectors, small_maps
from wcosym.errors import OutOfDomain, WrongSpace
from wcosym.maps.lfmap import LinearFractionalMap, eval_map, identity_map, linear_map
from wcosym.series.multi_index import grlex_basis
from wcosym.series.power_series import PowerSeries, expand_log_reciprocal, expand_reciprocal_linear
from wcosym.spaces.kernels import (
    KernelDirective,
    SpaceKind,
    adjoint_on_deriv_kernel,
    adjoint_on_kernel,
    adjoint_on_second_deriv_kernel,
    affine_adjoint_symbols,
    deriv_kernel_eval,
    kernel_eval,
    kernel_norm_sq,
    monomial_norm_sq,
    monomial_norm_sq_exact,
    normalized_kernel_eval,
    require_dirichlet,
    second_deriv_kernel_eval,
)
from wcosym.spaces.weights import Constant, KernelPower, NormalizedKernel

DIRICHLET = SpaceKind.dirichlet(2)
HARDY = SpaceKind.hardy(2)


def inner_product(space, f, g):
    """单项式基下 ⟨f, g⟩ = Σ f_α·conj(g_α)·‖z^α‖²"""
    return sum(f.coefficient(alpha) * np.conj(g.coefficient(alpha)) * monomial_norm_sq(space, alpha)
               for alpha in f.basis)


def random_polynomial(rng, dim=2, degree=4):
    size = len(grlex_basis(dim, degree))
    return PowerSeries(dim, degree, rng.standard_normal(size) + 1j * rng.standard_normal(size))


class TestKernelValues:
    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_origin(self, space):
        assert kernel_eval(space, [0, 0], [0.3, 0.4j]) == approx(1.0)

    def test_dirichlet_diagonal(self):
        w = np.array([0.5, 0.5])
        assert kernel_eval(DIRICHLET, w, w) == approx(1 + math.log(2))

    def test_hardy_diagonal(self):
        assert kernel_eval(HARDY, [0.5, 0], [0.5, 0]) == approx(16 / 9)

    def test_norms(self):
        assert kernel_norm_sq(HARDY, [math.sqrt(0.75), 0]) == approx(16)
        assert kernel_norm_sq(DIRICHLET, [math.sqrt(1 - math.exp(-1)), 0]) == approx(2)
        assert kernel_norm_sq(DIRICHLET, [0, 0]) == approx(1)

    def test_normalized(self):
        w = np.array([0.5, 0])
        assert normalized_kernel_eval(HARDY, w, w) == approx(math.sqrt(16 / 9))

    def test_outside_domain(self):
        with raises(OutOfDomain):
            kernel_eval(HARDY, [1, 0], [1, 0])
        with raises(OutOfDomain):
            kernel_norm_sq(HARDY, [1, 0])

    @mark.parametrize("space", [DIRICHLET, HARDY])
    @given(w=ball_vectors(2, 0.9), z=ball_vectors(2, 0.9))
    def test_hermitian_symmetry(self, space, w, z):
        assert kernel_eval(space, w, z) == approx(np.conj(kernel_eval(space, z, w)))

    @given(w=ball_vectors(2, 0.9))
    def test_norm_is_diagonal_value(self, w):
        assert kernel_norm_sq(HARDY, w) == kernel_eval(HARDY, w, w).real


class TestDerivativeKernels:
    def test_first_order(self):
        assert deriv_kernel_eval(DIRICHLET, [0, 0], 0, [0.3, 0.4]) == approx(0.3)
        assert deriv_kernel_eval(DIRICHLET, [0.5, 0], 1, [0.2, 0.1]) == approx(0.1 / 0.9)

    def test_second_order(self):
        assert second_deriv_kernel_eval(DIRICHLET, [0, 0], 0, 1, [0.3, 0.4]) == approx(0.12)
        assert second_deriv_kernel_eval(DIRICHLET, [0.5, 0], 0, 1, [0.2, 0.1]) == approx(0.02 / 0.81)

    def test_hardy_rejected(self):
        with raises(WrongSpace):
            deriv_kernel_eval(HARDY, [0.5, 0], 0, [0.2, 0.1])
        with raises(WrongSpace):
            second_deriv_kernel_eval(HARDY, [0.5, 0], 0, 1, [0.2, 0.1])

    def test_directive_bounds(self):
        with raises(ValueError):
            KernelDirective((0, 0), (2,))
        with raises(ValueError):
            KernelDirective((0, 0), (0, 0, 0))

    @mark.parametrize("order", [(), (0,), (1,), (0, 1), (1, 1)])
    def test_directive_reproduces_derivatives(self, rng, order):
        # 用单项式内积直接计算 ⟨f, K⟩，与 f 在基点的偏导数比较
        f = random_polynomial(rng)
        w = np.array([0.3 - 0.1j, 0.2j])
        degree = f.degree_cap
        if len(order) == 0:
            g = expand_log_reciprocal(w, degree) + 1.0
        else:
            g = expand_reciprocal_linear(w, len(order), degree)
            for k in order:
                g = g * PowerSeries.variable(k, 2, degree)
        directive = KernelDirective(tuple(w), order)
        assert inner_product(DIRICHLET, f, g) == approx(directive.reproduce(f), rel=1e-10)


class TestMonomialNorms:
    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_constant(self, space):
        assert monomial_norm_sq(space, (0, 0)) == 1

    def test_examples(self):
        assert monomial_norm_sq(HARDY, (1, 0)) == approx(0.5)
        assert monomial_norm_sq(DIRICHLET, (1, 1)) == approx(1.0)
        assert monomial_norm_sq_exact(HARDY, (2, 1)) == Fraction(2 * 1, 24)

    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_reciprocal_of_kernel_coefficients(self, space):
        ones = np.ones(2)
        if space.is_dirichlet:
            kernel = expand_log_reciprocal(ones, 6, formal=True) + 1.0
        else:
            kernel = expand_reciprocal_linear(ones, 2, 6, formal=True)
        for alpha in grlex_basis(2, 6):
            assert kernel.coefficient(alpha).real * monomial_norm_sq(space, alpha) == approx(1.0)

    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_reproducing_property(self, rng, space):
        f = random_polynomial(rng, degree=6)
        for _ in range(10):
            w = rng.uniform(-0.4, 0.4, 2) + 1j * rng.uniform(-0.4, 0.4, 2)
            if space.is_dirichlet:
                kernel = expand_log_reciprocal(w, 6) + 1.0
            else:
                kernel = expand_reciprocal_linear(w, 2, 6)
            assert inner_product(space, f, kernel) == approx(f.evaluate(w), abs=1e-10)


class TestAdjointActions:
    def test_trivial_symbols(self):
        w = np.array([0.2, 0.1j])
        coef, image = adjoint_on_kernel(Constant(1.0), identity_map(2), w)
        assert coef == 1
        assert np.allclose(image, w)

    def test_kernel_power_at_origin(self):
        psi = KernelPower(0.5 + 0.5j, [0.3, 0], 2)
        phi = linear_map([[0.2, 0], [0, 0.4]])
        coef, image = adjoint_on_kernel(psi, phi, [0, 0])
        assert coef == approx(0.5 - 0.5j)
        assert np.allclose(image, 0)

    @given(small_maps(), ball_vectors(2, 0.5), ball_vectors(2, 0.5))
    def test_adjoint_matches_inner_product(self, phi, w, point):
        # ⟨W K_z, K_w⟩ = (W K_z)(w) 与 ⟨K_z, W* K_w⟩ = conj(W* K_w (z)) 相等
        psi = KernelPower(1.2 - 0.3j, [0.2, 0.1j], 2)
        coef, image = adjoint_on_kernel(psi, phi, w)
        lhs = psi.evaluate(w) * kernel_eval(HARDY, point, eval_map(phi, w))
        rhs = np.conj(coef * kernel_eval(HARDY, image, point))
        assert lhs == approx(rhs, abs=1e-11)

    def test_out_of_domain(self):
        with raises(OutOfDomain):
            adjoint_on_kernel(Constant(1.0), identity_map(2), [0.8, 0.8])

    def test_affine_adjoint_symbols(self):
        psi, phi = affine_adjoint_symbols(0.5 * np.eye(2), [0.25, 0])
        z = np.array([0.3, 0.2j])
        assert psi.evaluate(z) == approx((1 - 0.25 * z[0]) ** -2)
        assert np.allclose(eval_map(phi, z), 0.5 * z / (1 - 0.25 * z[0]))

    def test_derivative_identity(self):
        a = np.array([0.3, -0.2j])
        combo = adjoint_on_deriv_kernel(Constant(1.0), identity_map(2), a, 1)
        assert combo.directives() == [KernelDirective(tuple(a), (1,))]
        assert combo.coefficient(KernelDirective(tuple(a), (1,))) == approx(1.0)

    def test_derivative_linear_at_origin(self):
        s = np.array([[0.3, 0.1j], [0.2, 0.5]])
        combo = adjoint_on_deriv_kernel(Constant(2j), linear_map(s), [0, 0], 0)
        for j in range(2):
            directive = KernelDirective((0, 0), (j,))
            assert combo.coefficient(directive) == approx(np.conj(2j) * np.conj(s[j, 0]))

    def test_second_derivative_identity(self):
        a = np.array([0.1, 0.2])
        combo = adjoint_on_second_deriv_kernel(Constant(1.0), identity_map(2), a)
        assert combo.directives() == [KernelDirective(tuple(a), (0, 0))]

    def test_second_derivative_linear_at_origin(self):
        s = np.array([[0.3, 0.1], [0.2j, 0.5]])
        combo = adjoint_on_second_deriv_kernel(Constant(1.0), linear_map(s), [0, 0])
        for i in range(2):
            for j in range(2):
                directive = KernelDirective((0, 0), (i, j))
                assert combo.coefficient(directive) == approx(np.conj(s[i, 0] * s[j, 0]))

    @mark.parametrize("k", [0, 1])
    def test_derivative_matches_finite_differences(self, rng, k):
        f = random_polynomial(rng, degree=3)
        psi = NormalizedKernel(0.9 + 0.2j, [0.2, -0.3j], 2)
        phi = small_phi()
        a = np.array([0.15 + 0.05j, -0.1j])
        g = lambda z: psi.evaluate(z) * f.evaluate(eval_map(phi, z))
        h = 1e-5
        step = np.zeros(2, dtype=complex)
        step[k] = h
        numeric = (g(a + step) - g(a - step)) / (2 * h)
        combo = adjoint_on_deriv_kernel(psi, phi, a, k)
        assert abs(combo.pair(f) - numeric) < 1e-7

    def test_second_derivative_matches_finite_differences(self, rng):
        f = random_polynomial(rng, degree=3)
        psi = KernelPower(1.1, [0.25, 0.1], 2)
        phi = small_phi()
        a = np.array([0.1, 0.2 - 0.1j])
        g = lambda z: psi.evaluate(z) * f.evaluate(eval_map(phi, z))
        h = 1e-4
        step = np.array([h, 0], dtype=complex)
        numeric = (g(a + step) - 2 * g(a) + g(a - step)) / h ** 2
        combo = adjoint_on_second_deriv_kernel(psi, phi, a)
        assert abs(combo.pair(f) - numeric) < 1e-5


def small_phi():
    return LinearFractionalMap([[0.3, 0.1], [0.1j, -0.2]], [0.1, 0.05j], [0.2, -0.1], 1.0)


def test_require_dirichlet():
    require_dirichlet(DIRICHLET)
    with raises(WrongSpace):
        require_dirichlet(HARDY)
