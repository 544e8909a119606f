import json

import numpy as np
from pytest import approx, fixture, mark, raises

from wcosym.errors import (
    DenominatorVanishesAtOrigin,
    DimensionMismatch,
    InvalidConjugation,
    NotInBall,
    SchemaError,
)
from wcosym.maps.lfmap import LinearFractionalMap, affine_map, identity_map, linear_map
from wcosym.operators.compression import (
    WeightedCompositionSpec,
    build_compression,
    from_orthonormal,
    to_orthonormal,
)
from wcosym.operators.conjugation import (
    JCU,
    PlainJ,
    WPhiJ,
    apply_conjugation,
    build_conjugation,
)
from wcosym.operators.export import export_matrix, import_matrix
from wcosym.operators.residuals import (
    default_samples,
    hermitian_residual,
    kernel_hermitian_residual,
    kernel_symmetry_residual,
    normal_residual,
    symmetry_residual_matrix,
    unitary_residual,
)
from wcosym.series.multi_index import count_monomials_leq
from wcosym.series.power_series import PowerSeries, compose_series, map_component_series, weight_series
from wcosym.spaces.kernels import SpaceKind
from wcosym.spaces.weights import Constant, KernelPower
from wcosym.verdicts.hardy import JsymChoice, SymbolFamily, build_unitary_Jsym

DIRICHLET = SpaceKind.dirichlet(2)
HARDY = SpaceKind.hardy(2)
HERMITIAN_H = np.array([[0.5, 0.2j], [-0.2j, 0.3]])


def operator(space, psi, phi):
    return WeightedCompositionSpec(space, psi, phi)


@fixture
def plain_j_matrix():
    return build_conjugation(PlainJ(), DIRICHLET, 6)


class TestOperatorSpec:
    def test_dimension_mismatch(self):
        with raises(DimensionMismatch):
            operator(DIRICHLET, Constant(1.0), identity_map(3))
        with raises(DimensionMismatch):
            operator(DIRICHLET, KernelPower(1.0, [0.1, 0, 0], 2), identity_map(2))

    def test_not_a_self_map_at_origin(self):
        with raises(NotInBall):
            operator(HARDY, Constant(1.0), affine_map(np.eye(2), [1.5, 0]))

    def test_pole_at_origin(self):
        with raises(DenominatorVanishesAtOrigin):
            operator(HARDY, Constant(1.0), LinearFractionalMap(np.eye(2), [0, 0], [1, 0], 0))

    def test_apply(self):
        w = operator(HARDY, Constant(2.0), linear_map(0.5 * np.eye(2)))
        g = w.apply(lambda z: z[0] + z[1])
        assert g(np.array([0.2, 0.4])) == approx(0.6)


class TestCompression:
    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_identity(self, space):
        t = build_compression(operator(space, Constant(1.0), identity_map(2)), 4)
        assert t.size == count_monomials_leq(2, 4)
        assert np.allclose(t.matrix, np.eye(t.size))

    def test_diagonal_map(self):
        t = build_compression(operator(DIRICHLET, Constant(1.0), linear_map(np.diag([0.3, 0.5]))), 2)
        # grlex: 1, z₂, z₁, z₂², z₁z₂, z₁²
        assert np.allclose(t.matrix, np.diag([1, 0.5, 0.3, 0.25, 0.15, 0.09]))

    def test_hardy_disk_affine(self):
        phi = LinearFractionalMap([[0.5]], [0.25], [0.0], 1.0)
        t = build_compression(operator(SpaceKind.hardy(1), Constant(1.0), phi), 3)
        assert t.matrix[0, 1] == approx(0.25)
        assert t.matrix[1, 1] == approx(0.5)
        assert t.matrix[1, 0] == 0

    def test_default_degree(self):
        t = build_compression(operator(HARDY, Constant(1.0), identity_map(2)))
        assert t.degree_cap == 8

    @mark.parametrize("space", [DIRICHLET, HARDY])
    def test_matches_series_action(self, rng, space):
        psi = KernelPower(0.7 + 0.2j, [0.2, -0.1j], 2)
        phi = LinearFractionalMap([[0.3, 0.1], [0.1j, -0.2]], [0.1, 0.05j], [0.2, -0.1], 1.0)
        degree = 5
        t = build_compression(operator(space, psi, phi), degree)
        size = count_monomials_leq(2, degree)
        f = PowerSeries(2, degree, rng.standard_normal(size) + 1j * rng.standard_normal(size))
        expected = weight_series(psi, degree) * compose_series(f, map_component_series(phi, degree))
        got = from_orthonormal(t.apply(to_orthonormal(f, space)), space, degree)
        assert got.allclose(expected, tol=1e-12)

    def test_leading_size(self):
        t = build_compression(operator(HARDY, Constant(1.0), identity_map(2)), 4)
        assert t.leading_size() == t.size
        assert t.leading_size(2) == 6
        with raises(DimensionMismatch):
            t.leading_size(5)


class TestSymmetryResiduals:
    def test_identity(self, plain_j_matrix):
        t = build_compression(operator(DIRICHLET, Constant(1.0), identity_map(2)), 6)
        assert symmetry_residual_matrix(t, plain_j_matrix) == 0

    def test_symmetric_linear_map(self, plain_j_matrix, symmetric_s):
        t = build_compression(operator(DIRICHLET, Constant(2.0), linear_map(symmetric_s)), 6)
        assert symmetry_residual_matrix(t, plain_j_matrix) < 1e-12

    def test_non_symmetric_linear_map(self, plain_j_matrix, symmetric_s):
        s = symmetric_s.copy()
        s[1, 0] = 0.2
        t = build_compression(operator(DIRICHLET, Constant(2.0), linear_map(s)), 6)
        assert symmetry_residual_matrix(t, plain_j_matrix) > 1e-2

    def test_size_mismatch(self, plain_j_matrix):
        t = build_compression(operator(DIRICHLET, Constant(1.0), identity_map(2)), 4)
        with raises(DimensionMismatch):
            symmetry_residual_matrix(t, plain_j_matrix)

    def test_jcu_symmetric(self):
        u = np.exp(0.4j) * np.eye(2)
        s = np.diag([0.3, 0.5])
        w = operator(DIRICHLET, Constant(1.5), linear_map(s @ u.conj()))
        t = build_compression(w, 6)
        c = build_conjugation(JCU(u), DIRICHLET, 6)
        assert symmetry_residual_matrix(t, c) < 1e-10

    def test_kernel_level(self, symmetric_s):
        samples = default_samples(2, count=30)
        trivial = operator(DIRICHLET, Constant(1.0), identity_map(2))
        assert kernel_symmetry_residual(trivial, PlainJ(), samples) < 1e-14
        good = operator(DIRICHLET, Constant(2.0), linear_map(symmetric_s))
        assert kernel_symmetry_residual(good, PlainJ(), samples) < 1e-12
        s = symmetric_s.copy()
        s[1, 0] = 0.2
        bad = operator(DIRICHLET, Constant(2.0), linear_map(s))
        assert kernel_symmetry_residual(bad, PlainJ(), samples) > 1e-4

    def test_samples_are_reproducible(self):
        first, second = default_samples(2, count=5), default_samples(2, count=5)
        assert all(np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]) for a, b in zip(first, second))
        assert all(np.linalg.norm(z) <= 0.6 for pair in first for z in pair)


class TestOperatorResiduals:
    def test_hermitian(self):
        t = build_compression(operator(DIRICHLET, Constant(1.5), linear_map(HERMITIAN_H)), 6)
        assert hermitian_residual(t) < 1e-12

    def test_zero_operator(self):
        t = build_compression(operator(DIRICHLET, Constant(0.0), identity_map(2)), 3)
        assert hermitian_residual(t) == 0.0

    def test_degree_preserving(self):
        assert operator(HARDY, Constant(2.0), linear_map(HERMITIAN_H)).degree_preserving()
        assert not operator(HARDY, Constant(1.0), affine_map(0.5 * np.eye(2), [0.25, 0])).degree_preserving()
        assert not operator(HARDY, KernelPower(1.0, [0.3, 0], 2), identity_map(2)).degree_preserving()

    def test_complex_weight_is_not_hermitian(self):
        t = build_compression(operator(DIRICHLET, Constant(1.5j), linear_map(HERMITIAN_H)), 6)
        assert hermitian_residual(t) > 0.1

    def test_unitary_rotation(self, swap):
        t = build_compression(operator(DIRICHLET, Constant(1j), linear_map(swap)), 6)
        assert unitary_residual(t) < 1e-12
        theta = 0.7
        rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        t = build_compression(operator(HARDY, Constant(np.exp(0.3j)), linear_map(rotation)), 6)
        assert unitary_residual(t) < 1e-10

    def test_contraction_is_not_unitary(self):
        t = build_compression(operator(DIRICHLET, Constant(0.5), identity_map(2)), 4)
        assert unitary_residual(t) == approx(0.75 * np.sqrt(t.size))

    def test_normal(self):
        diagonal = build_compression(operator(DIRICHLET, Constant(1.0), linear_map(np.diag([0.3, 0.6]))), 5)
        assert normal_residual(diagonal) == 0
        a = np.array([[0.3, 0.2], [-0.2, 0.3]])
        t = build_compression(operator(HARDY, Constant(1.0), linear_map(a)), 6)
        assert normal_residual(t) < 1e-12

    def test_shift_is_not_normal(self):
        phi = LinearFractionalMap([[0.5]], [0.25], [0.0], 1.0)
        t = build_compression(operator(SpaceKind.hardy(1), Constant(1.0), phi), 8)
        assert normal_residual(t) > 1e-3

    def test_kernel_hermitian(self):
        samples = default_samples(2, count=30)
        family = SymbolFamily(0.5, [0.3, 0], [[0.2, 0.1], [0.1, 0.4]])
        assert kernel_hermitian_residual(family.spec(), samples) < 1e-9
        twisted = SymbolFamily(0.5j, [0.3, 0], [[0.2, 0.1], [0.1, 0.4]])
        assert kernel_hermitian_residual(twisted.spec(), samples) > 1e-3


class TestConjugations:
    def test_plain_j(self, plain_j_matrix):
        assert np.array_equal(plain_j_matrix.m, np.eye(plain_j_matrix.size))
        assert plain_j_matrix.exact
        assert plain_j_matrix.involution_residual() == 0
        assert plain_j_matrix.isometry_residual() == 0

    def test_jcu_swap(self, swap):
        c = build_conjugation(JCU(swap), HARDY, 5)
        assert c.exact
        assert c.involution_residual() < 1e-12
        assert c.isometry_residual() < 1e-12

    def test_jcu_rejects_bad_u(self):
        with raises(InvalidConjugation):
            JCU([[1, 1], [0, 1]])
        with raises(InvalidConjugation):
            JCU([[0, 2], [2, 0]])

    def test_apply_jcu(self, swap):
        f = lambda z: z[0] + 2j * z[1]
        z = np.array([0.1 + 0.2j, -0.3j])
        assert apply_conjugation(JCU(swap), f)(z) == approx(z[1] - 2j * z[0])

    def test_apply_plain_j(self):
        f = lambda z: (1 + 1j) * z[0]
        assert apply_conjugation(PlainJ(), f)(np.array([0.2j, 0])) == approx((1 - 1j) * 0.2j)

    def test_wphij_residuals_shrink_with_degree(self):
        psi, phi = build_unitary_Jsym(JsymChoice.INVOLUTION, {"a": [0.3, 0.2]})
        residuals = []
        for degree in (4, 6, 8):
            c = build_conjugation(WPhiJ(psi, phi), HARDY, degree)
            assert not c.exact
            residuals.append(c.involution_residual(count_monomials_leq(2, 2)))
        assert residuals[0] >= residuals[1] >= residuals[2]
        assert residuals[2] < residuals[0]

    def test_unknown_conjugation(self):
        with raises(InvalidConjugation):
            build_conjugation(object(), HARDY, 2)


class TestExport:
    def test_roundtrip_is_bit_exact(self, tmp_path):
        w = operator(HARDY, KernelPower(0.8, [0.1j, 0.3], 2), LinearFractionalMap(
            [[0.2, 0.1], [0.1, -0.3j]], [0.1, 0], [0.05, 0.1], 1.0))
        t = build_compression(w, 4)
        path = tmp_path / "matrix.json"
        text = export_matrix(t, str(path))
        assert path.read_text(encoding="utf-8") == text
        back = import_matrix(text)
        assert back.space == t.space and back.degree_cap == 4
        assert np.array_equal(back.matrix, t.matrix)

    def test_payload(self):
        t = build_compression(operator(SpaceKind.hardy(1), Constant(1.0), identity_map(1)), 2)
        payload = json.loads(export_matrix(t))
        assert payload["space"] == "hardy" and payload["N"] == 1 and payload["D"] == 2
        assert payload["ordering"] == "grlex"
        assert payload["entries"][0] == [1.0, 0.0]
        assert len(payload["entries"]) == 9

    def test_wrong_ordering(self):
        t = build_compression(operator(SpaceKind.hardy(1), Constant(1.0), identity_map(1)), 2)
        payload = json.loads(export_matrix(t))
        payload["ordering"] = "lex"
        with raises(SchemaError) as info:
            import_matrix(json.dumps(payload))
        assert info.value.path == "/ordering"

    def test_wrong_size(self):
        payload = {"space": "dirichlet", "N": 1, "D": 2, "ordering": "grlex", "entries": [[1.0, 0.0]]}
        with raises(DimensionMismatch):
            import_matrix(json.dumps(payload))

    def test_missing_field_and_bad_json(self):
        with raises(SchemaError) as info:
            import_matrix(json.dumps({"space": "hardy"}))
        assert info.value.path == "/N"
        with raises(SchemaError):
            import_matrix("not json")
