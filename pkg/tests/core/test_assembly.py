"""
Tests for the refraction index and the block pencil assembly.
"""

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from src.core.exceptions import AssemblyError, CoefficientError, DiscretizationError
from src.core.spectral.assembly import (
    Coefficient,
    apply_pencil,
    assemble_pencil,
    element_matrices,
    element_tables,
    kronecker_element_matrices,
)
from src.core.spectral.basis1d import build_basis
from src.core.spectral.dofmap import build_dofmap, clamp_boundary
from src.core.spectral.interp import SmoothFunction, interp_global
from src.core.spectral.mesh import BoxDomain, build_mesh
from src.core.spectral.orthopoly import gauss_legendre
from tests.fixtures.reference_fixtures import ReferenceDomains


def _discretization(boxes, N, level=0):
    mesh = build_mesh(BoxDomain.from_boxes(boxes), level)
    dofmap = clamp_boundary(build_dofmap(mesh, 2, N), mesh)
    return mesh, dofmap, build_basis(2, N)


def _bubble_square() -> SmoothFunction:
    """x^2 (1-x)^2 y^2 (1-y)^2, which lies in H^2_0 of the unit square."""
    f = np.array([0.0, 0.0, 1.0, -2.0, 1.0])
    return SmoothFunction.polynomial(np.outer(f, f), name="bubble")


class TestCoefficient:
    """Tests for the refraction index value type."""

    def test_parse_and_describe(self):
        coeff = Coefficient.parse("affine 8 1 -1")
        assert coeff.kind == "affine"
        assert coeff.c0 == 8.0
        assert coeff.c == (1.0, -1.0)
        assert coeff.describe() == "affine 8 1 -1"
        assert Coefficient.parse(coeff.describe()) == coeff

    def test_values_and_gradients(self):
        points = np.array([[0.5, 0.25], [0.0, 0.0]])
        affine = Coefficient.parse("affine 8 1 -1")
        assert np.allclose(affine.value(points), [8.25, 8.0])
        assert np.allclose(affine.gradient(points), [[1.0, -1.0], [1.0, -1.0]])

        exp_affine = Coefficient.parse("exp-affine 4 1 1")
        assert np.allclose(exp_affine.value(points), [4.0 + np.exp(0.75), 5.0])
        assert np.allclose(exp_affine.gradient(points)[0], [np.exp(0.75), np.exp(0.75)])

        constant = Coefficient.constant(16)
        assert np.allclose(constant.value(points), 16.0)
        assert np.allclose(constant.gradient(points), 0.0)

    def test_quadrature_extra(self):
        assert Coefficient.constant(16).quadrature_extra == 2
        assert Coefficient.parse("exp-affine 4 1 1").quadrature_extra == 4

    def test_invalid_coefficients(self):
        cases = [
            ("quadratic 1 2", "unknown coefficient kind"),
            ("constant", "needs a kind and parameters"),
            ("constant 16 1", "single parameter"),
            ("affine 8", "one slope per direction"),
            ("affine 8 x", "non-numeric"),
        ]
        for text, message in cases:
            with pytest.raises(DiscretizationError, match=message):
                Coefficient.parse(text)

    def test_slope_dimension_mismatch(self):
        with pytest.raises(DiscretizationError, match="do not match the dimension"):
            Coefficient.parse("affine 8 1").value(np.zeros((2, 2)))


class TestElementMatrices:
    """Tests for local blocks."""

    def setup_method(self):
        self.element = ((0.0, 0.5), (-0.5, 0.5))
        self.basis = build_basis(2, 6)
        self.tables = element_tables(self.element, self.basis, gauss_legendre(8))

    def test_kronecker_matches_quadrature(self):
        """Both paths agree for a constant index."""
        coeff = Coefficient.constant(16)
        dense = element_matrices(self.element, self.tables, coeff)
        sparse = kronecker_element_matrices(self.tables, coeff)
        for name in ("K", "M", "G", "C", "M0"):
            a, b = getattr(dense, name), getattr(sparse, name).toarray()
            assert np.allclose(a, b, atol=1e-12 * np.max(np.abs(a))), name

    def test_flat_affine_matches_constant(self):
        flat = Coefficient("affine", 16.0, (0.0, 0.0))
        constant = Coefficient.constant(16)
        a = element_matrices(self.element, self.tables, flat)
        b = element_matrices(self.element, self.tables, constant)
        assert np.allclose(a.G, b.G)
        assert np.allclose(a.K, b.K)

    def test_local_symmetry(self):
        blocks = element_matrices(self.element, self.tables, Coefficient.parse("exp-affine 4 1 1"))
        for name in ("K", "M", "G", "C"):
            matrix = getattr(blocks, name)
            assert np.allclose(matrix, matrix.T, atol=1e-12 * np.max(np.abs(matrix))), name

    def test_kronecker_needs_constant(self):
        with pytest.raises(DiscretizationError, match="constant coefficient"):
            kronecker_element_matrices(self.tables, Coefficient.parse("affine 8 1 -1"))

    def test_tables_need_second_derivatives(self):
        tables = element_tables(self.element, self.basis, gauss_legendre(8), max_deriv=1)
        with pytest.raises(DiscretizationError, match="order 2"):
            element_matrices(self.element, tables, Coefficient.constant(16))


class TestPencilAssembly:
    """Tests for the assembled global pencil."""

    def test_bubble_patch_values(self):
        """Quadratic forms of an H^2_0 polynomial match closed-form integrals."""
        for level, N in [(0, 6), (1, 4)]:
            mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE, N, level)
            pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.constant(16))
            full = interp_global(_bubble_square(), mesh, dofmap, basis)
            assert np.max(np.abs(full[dofmap.constrained])) < 1e-13
            u = full[dofmap.free_dofs]

            a, b = 1.0 / 15.0, 16.0 / 15.0
            assert u @ pencil.M @ u == pytest.approx(1.0 / 396900.0, rel=1e-10)
            assert u @ pencil.C @ u == pytest.approx(b / 396900.0, rel=1e-10)
            assert u @ pencil.G @ u == pytest.approx((a + b) * 2.0 / 33075.0, rel=1e-10)
            assert u @ pencil.K @ u == pytest.approx(a * 4.0 / 1225.0, rel=1e-10)

    def test_pencil_layout(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.L_SHAPE_2D, 6)
        pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.constant(16))
        n = dofmap.n_free
        assert pencil.n_free == n
        assert pencil.A.shape == pencil.B.shape == (2 * n, 2 * n)
        A, B = pencil.A.toarray(), pencil.B.toarray()
        assert np.allclose(A[n:, n:], pencil.M.toarray())
        assert np.allclose(B[:n, n:], -pencil.C.toarray())
        assert np.allclose(B[n:, :n], pencil.M0.toarray())
        assert np.all(A[:n, n:] == 0.0) and np.all(B[n:, n:] == 0.0)

    def test_balanced_pencil(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE_CENTERED, 8)
        pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.constant(16))
        A, B, s = pencil.balanced()
        n = pencil.n_free
        assert s ** 2 == pytest.approx(spla.norm(pencil.K, 1) / spla.norm(pencil.M, 1))
        assert spla.norm(A[n:, n:], 1) == pytest.approx(spla.norm(pencil.K, 1))

        x = np.random.default_rng(3).standard_normal(pencil.dimension)
        y = np.concatenate([x[:n], x[n:] / s])
        for balanced, raw in ((A, pencil.A), (B, pencil.B)):
            expected = raw @ x
            expected[n:] *= s
            assert np.allclose(balanced @ y, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))

    def test_global_symmetry_variable_index(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE_CENTERED, 7, level=1)
        pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.parse("affine 8 1 -1"))
        for name, matrix in pencil.blocks():
            dense = matrix.toarray()
            assert np.allclose(dense, dense.T, atol=1e-12 * np.max(np.abs(dense))), name

    def test_mass_positive_definite(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.L_SHAPE_2D, 6)
        pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.constant(16))
        assert np.min(np.linalg.eigvalsh(pencil.M.toarray())) > 0.0

    def test_workers_give_same_pencil(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.L_SHAPE_2D, 5)
        coeff = Coefficient.parse("affine 8 1 -1")
        serial = assemble_pencil(mesh, dofmap, basis, coeff)
        threaded = assemble_pencil(mesh, dofmap, basis, coeff, workers=2)
        assert abs(serial.G - threaded.G).max() < 1e-14

    def test_sign_changing_index_rejected(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE_CENTERED, 5)
        with pytest.raises(CoefficientError) as excinfo:
            assemble_pencil(mesh, dofmap, basis, Coefficient.parse("affine 1 1 0"))
        assert excinfo.value.exit_code == 3

    def test_unit_index_rejected(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE, 5)
        with pytest.raises(CoefficientError, match="n - 1"):
            assemble_pencil(mesh, dofmap, basis, Coefficient.constant(1.0))

    def test_needs_m2(self):
        mesh = build_mesh(BoxDomain.from_boxes(ReferenceDomains.UNIT_SQUARE))
        dofmap = build_dofmap(mesh, 1, 4)
        with pytest.raises(DiscretizationError, match="m = 2"):
            assemble_pencil(mesh, dofmap, build_basis(1, 4), Coefficient.constant(16))

    def test_apply_pencil(self):
        mesh, dofmap, basis = _discretization(ReferenceDomains.UNIT_SQUARE, 5)
        pencil = assemble_pencil(mesh, dofmap, basis, Coefficient.constant(16))
        x = np.ones(pencil.dimension)
        assert np.allclose(apply_pencil(pencil, "A", x), pencil.A @ x)
        with pytest.raises(DiscretizationError, match="side"):
            apply_pencil(pencil, "C", x)
        with pytest.raises(AssemblyError, match="vector length"):
            apply_pencil(pencil, "B", np.ones(3))
