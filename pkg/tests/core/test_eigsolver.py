"""
Tests for the dense and shift-invert generalized eigensolvers.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from src.core.exceptions import DiscretizationError, SolverError
from src.core.spectral.assembly import Coefficient, assemble_pencil, default_quadrature
from src.core.spectral.basis1d import build_basis
from src.core.spectral.dofmap import build_dofmap, clamp_boundary
from src.core.spectral.eigsolver import (
    EigOptions,
    residual_check,
    solve,
    solve_dense,
    solve_shift_invert,
)
from src.core.spectral.mesh import BoxDomain, build_mesh
from tests.fixtures.reference_fixtures import ReferenceDomains


def _random_pencil(n: int, seed: int):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    B = np.eye(n) + 0.1 * rng.standard_normal((n, n))
    return A, B


class TestEigOptions:
    """Tests for solver options."""

    def test_defaults(self):
        opts = EigOptions()
        assert opts.count == 8
        assert opts.method == "auto"
        assert opts.ncv == 30
        assert EigOptions(count=20).ncv == 50
        assert EigOptions(count=4, subspace=12).ncv == 12

    def test_invalid_options(self):
        with pytest.raises(DiscretizationError, match="count"):
            EigOptions(count=0)
        with pytest.raises(DiscretizationError, match="unknown eigensolver method"):
            EigOptions(method="lanczos")
        with pytest.raises(DiscretizationError, match="subspace"):
            EigOptions(count=8, subspace=8)


class TestDenseSolver:
    """Tests for QZ."""

    def test_diagonal_pencil(self):
        A = np.diag(np.arange(1.0, 7.0))
        result = solve_dense(A, np.eye(6))
        assert np.allclose(result.eigenvalues, np.arange(1.0, 7.0))
        assert result.method == "dense"
        assert result.all_converged
        assert np.max(result.residuals) < 1e-14

    def test_rotation_has_imaginary_pair(self):
        A = np.array([[0.0, -1.0], [1.0, 0.0]])
        result = solve_dense(A, np.eye(2))
        assert sorted(result.eigenvalues.imag) == pytest.approx([-1.0, 1.0])
        assert np.allclose(result.eigenvalues.real, 0.0)

    def test_singular_b_gives_infinite_eigenvalue(self):
        A = np.eye(3)
        B = np.diag([1.0, 0.5, 0.0])
        result = solve_dense(A, B)
        assert result.infinite == 1
        assert np.allclose(sorted(result.eigenvalues.real), [1.0, 2.0])

    def test_sparse_input(self):
        A = sp.diags(np.arange(1.0, 5.0)).tocsr()
        result = solve_dense(A, sp.identity(4, format="csr"))
        assert len(result) == 4

    def test_nearest_subset(self):
        result = solve_dense(np.diag(np.arange(1.0, 11.0)), np.eye(10)).nearest(4.2, 3)
        assert np.allclose(result.eigenvalues, [4.0, 5.0, 3.0])
        assert result.eigenvectors.shape == (10, 3)

    def test_shape_mismatch(self):
        with pytest.raises(DiscretizationError, match="square"):
            solve_dense(np.eye(3), np.eye(4))


class TestShiftInvert:
    """Tests for the ARPACK path."""

    def test_diagonal_near_shift(self):
        A = sp.diags(np.arange(1.0, 51.0)).tocsr()
        B = sp.identity(50, format="csr")
        result = solve_shift_invert(A, B, EigOptions(count=3, shift=0.9))
        assert np.allclose(result.eigenvalues.real, [1.0, 2.0, 3.0])
        assert np.allclose(result.eigenvalues.imag, 0.0)
        assert result.method == "arnoldi"
        assert result.all_converged
        assert result.stats["matvecs"] > 0

    def test_agrees_with_dense(self):
        """Arnoldi values belong to the dense spectrum and are the ones nearest the shift."""
        A, B = _random_pencil(50, seed=11)
        opts = EigOptions(count=5, shift=0.3, tol=1e-8)
        spectrum = solve_dense(A, B, opts).eigenvalues
        arnoldi = solve_shift_invert(sp.csr_matrix(A), sp.csr_matrix(B), opts)
        assert len(arnoldi) == 5
        for lam in arnoldi.eigenvalues:
            assert np.min(np.abs(spectrum - lam)) < 1e-8
        fifth = np.sort(np.abs(spectrum - opts.shift))[4]
        assert np.max(np.abs(arnoldi.eigenvalues - opts.shift)) <= fifth + 1e-8
        assert np.max(arnoldi.residuals) < 1e-10

    def test_complex_shift(self):
        A = sp.block_diag([np.array([[0.0, -1.0], [1.0, 0.0]]), sp.diags(np.arange(5.0, 15.0))]).tocsr()
        result = solve_shift_invert(A, sp.identity(12, format="csr"), EigOptions(count=2, shift=0.1 + 0.9j))
        assert result.eigenvalues[0] == pytest.approx(1j)
        assert result.eigenvalues[1] == pytest.approx(-1j)

    def test_small_problem_uses_dense_operator(self):
        A = sp.diags([1.0, 2.0, 3.0, 4.0]).tocsr()
        result = solve_shift_invert(A, sp.identity(4, format="csr"), EigOptions(count=3, shift=2.1))
        assert np.allclose(result.eigenvalues.real, [2.0, 3.0, 1.0])

    def test_singular_shift(self):
        A = sp.diags(np.arange(1.0, 11.0)).tocsc()
        with pytest.raises(SolverError, match="perturb the shift") as excinfo:
            solve_shift_invert(A, sp.identity(10, format="csr"), EigOptions(count=2, shift=3.0))
        assert excinfo.value.exit_code == 4


class TestDispatchAndResiduals:
    """Tests for method selection and residual checks."""

    def test_auto_picks_dense_for_small_pencils(self):
        A, B = _random_pencil(20, seed=2)
        result = solve(sp.csr_matrix(A), sp.csr_matrix(B), EigOptions(count=4, shift=0.5))
        assert result.method == "dense"
        assert len(result) == 4
        distances = np.abs(result.eigenvalues - 0.5)
        assert np.all(np.diff(distances) >= 0)

    def test_auto_picks_arnoldi_above_threshold(self):
        A = sp.diags(np.arange(1.0, 41.0)).tocsr()
        opts = EigOptions(count=2, shift=10.2, dense_threshold=10)
        result = solve(A, sp.identity(40, format="csr"), opts)
        assert result.method == "arnoldi"
        assert np.allclose(result.eigenvalues.real, [10.0, 11.0])

    def test_residual_check(self):
        A = np.diag([2.0, 3.0])
        assert residual_check(A, np.eye(2), 2.0, np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-16)
        assert residual_check(A, np.eye(2), 2.0, np.array([0.0, 1.0])) > 0.1

    def test_residual_of_zero_vector(self):
        with pytest.raises(DiscretizationError, match="zero vector"):
            residual_check(np.eye(2), np.eye(2), 1.0, np.zeros(2))


class TestTransmissionPencil:
    """Dense QZ as the oracle for shift-invert on the N = 15 unit square pencil."""

    def setup_method(self):
        mesh = build_mesh(BoxDomain.from_boxes(ReferenceDomains.UNIT_SQUARE_CENTERED))
        dofmap = clamp_boundary(build_dofmap(mesh, 2, 15), mesh)
        basis = build_basis(2, 15)
        coeff = Coefficient.constant(16)
        self.pencil = assemble_pencil(mesh, dofmap, basis, coeff, default_quadrature(basis, coeff))

    def test_shift_invert_matches_dense(self):
        assert self.pencil.dimension == 288
        A, B, _ = self.pencil.balanced()
        opts = EigOptions(count=5, shift=2.0)
        dense = solve_dense(A, B, opts).nearest(opts.shift, opts.count)
        arnoldi = solve_shift_invert(A, B, opts)
        assert arnoldi.method == "arnoldi"
        assert len(arnoldi) == 5
        for lam in arnoldi.eigenvalues:
            assert np.min(np.abs(dense.eigenvalues - lam) / np.abs(lam)) < 1e-9
        nearest = np.abs(dense.eigenvalues - opts.shift)
        assert np.abs(arnoldi.eigenvalues - opts.shift) == pytest.approx(nearest, rel=1e-9)
