"""
Tests for Legendre, Jacobi and GJP evaluation and Gauss-Legendre rules.
"""

import numpy as np
import pytest

from src.core.exceptions import DiscretizationError
from src.core.spectral.orthopoly import (
    JacobiParams,
    PolyInLegendre,
    compact_legendre_scale,
    gamma_norm,
    gauss_legendre,
    gjp_eval,
    gjp_to_legendre,
    jacobi_eval,
    legendre_eval,
)


class TestLegendreAndJacobi:
    """Tests for classical polynomial evaluation."""

    def test_legendre_values(self):
        """Closed-form Legendre values and derivatives."""
        assert legendre_eval(0, 0.7) == pytest.approx(1.0)
        assert legendre_eval(2, 0.0) == pytest.approx(-0.5)
        assert legendre_eval(3, 0.5) == pytest.approx(-0.4375)
        assert legendre_eval(4, 0.0, 2) == pytest.approx(-7.5)

    def test_legendre_endpoint_values(self):
        x = np.array([-1.0, 1.0])
        for n in range(8):
            values = legendre_eval(n, x)
            assert values[1] == pytest.approx(1.0)
            assert values[0] == pytest.approx((-1.0) ** n)

    def test_derivative_above_degree_is_zero(self):
        assert np.allclose(legendre_eval(3, np.linspace(-1, 1, 5), 4), 0.0)

    def test_jacobi_normalization_at_one(self):
        """P_n^{a,b}(1) = binom(n + a, n)."""
        params = JacobiParams(2.0, 2.0)
        assert jacobi_eval(params, 0, 1.0) == pytest.approx(1.0)
        assert jacobi_eval(params, 1, 1.0) == pytest.approx(3.0)
        assert jacobi_eval(params, 2, 1.0) == pytest.approx(6.0)

    def test_gamma_norm_values(self):
        assert gamma_norm(JacobiParams(0.0, 0.0), 0) == pytest.approx(2.0)
        assert gamma_norm(JacobiParams(0.0, 0.0), 1) == pytest.approx(2.0 / 3.0)
        assert gamma_norm(JacobiParams(2.0, 2.0), 0) == pytest.approx(16.0 / 15.0)

    def test_gamma_norm_matches_quadrature(self):
        """Weighted squared norms agree with a high-order quadrature."""
        params = JacobiParams(2.0, 1.0)
        rule = gauss_legendre(20)
        weight = (1 - rule.nodes) ** 2 * (1 + rule.nodes)
        for j in range(6):
            values = jacobi_eval(params, j, rule.nodes)
            numeric = np.sum(rule.weights * weight * values**2)
            assert numeric == pytest.approx(gamma_norm(params, j), rel=1e-12)

    def test_negative_indices_rejected(self):
        with pytest.raises(DiscretizationError, match="classical Jacobi"):
            jacobi_eval(JacobiParams(-2.0, -2.0), 3, 0.0)
        with pytest.raises(DiscretizationError, match="classical Jacobi"):
            gamma_norm(JacobiParams(-1.0, 0.0), 1)

    def test_gjp_params(self):
        params = JacobiParams.gjp(2)
        assert (params.alpha, params.beta, params.m) == (-2, -2, 2)
        assert not params.is_classical
        with pytest.raises(DiscretizationError):
            JacobiParams.gjp(0)


class TestGeneralizedJacobi:
    """Tests for the GJP bubbles."""

    def test_gjp_values(self):
        """Lowest GJPs are the pure weight factors."""
        assert gjp_eval(1, 2, 0.0) == pytest.approx(1.0)
        assert gjp_eval(2, 4, 0.0) == pytest.approx(1.0)
        assert gjp_eval(2, 4, 0.5) == pytest.approx(0.5625)

    def test_compact_scaling_value(self):
        """Scaled j = 4 bubble equals 7 L0 - 10 L2 + 3 L4, worth 13.125 at the origin."""
        assert compact_legendre_scale(4) == pytest.approx(13.125)
        assert gjp_eval(2, 4, 0.0) * compact_legendre_scale(4) == pytest.approx(13.125)

    def test_endpoint_vanishing(self):
        """GJPs of order m vanish with derivatives through m - 1 at both ends."""
        ends = np.array([-1.0, 1.0])
        for m in (1, 2, 3):
            for j in range(2 * m, 2 * m + 5):
                for k in range(m):
                    assert np.allclose(gjp_eval(m, j, ends, k), 0.0, atol=1e-12), f"m={m} j={j} k={k}"

    def test_second_derivatives_orthogonal(self):
        """m = 2 bubbles have mutually orthogonal second derivatives."""
        rule = gauss_legendre(20)
        table = np.array([gjp_eval(2, j, rule.nodes, 2) for j in range(4, 14)])
        gram = (table * rule.weights) @ table.T
        off_diagonal = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off_diagonal)) < 1e-10 * np.max(np.abs(gram))

    def test_second_derivative_norm(self):
        """int ((1 - x^2)^2)''^2 = 25.6."""
        rule = gauss_legendre(8)
        values = gjp_eval(2, 4, rule.nodes, 2)
        assert np.sum(rule.weights * values**2) == pytest.approx(25.6)

    def test_invalid_index(self):
        with pytest.raises(DiscretizationError, match="j >= 2m"):
            gjp_eval(2, 3, 0.0)
        with pytest.raises(DiscretizationError, match="j >= 4"):
            compact_legendre_scale(3)


class TestLegendreConversion:
    """Tests for GJP coefficients in the Legendre basis."""

    def test_compact_combination(self):
        poly = gjp_to_legendre(2, 4, 8).scaled(compact_legendre_scale(4))
        expected = np.zeros(9)
        expected[[0, 2, 4]] = [7.0, -10.0, 3.0]
        assert np.allclose(poly.coeffs, expected, atol=1e-12)
        assert poly.degree == 4

    def test_first_order_bubble(self):
        """1 - x^2 = (2/3) (L0 - L2)."""
        coeffs = gjp_to_legendre(1, 2, 4).coeffs
        assert np.allclose(coeffs, [2.0 / 3.0, 0.0, -2.0 / 3.0, 0.0, 0.0], atol=1e-13)

    def test_parity(self):
        coeffs = gjp_to_legendre(2, 5, 10).coeffs
        assert np.all(coeffs[0::2] == 0.0)
        assert np.all(coeffs[6:] == 0.0)

    def test_evaluation_paths_agree(self):
        """Legendre expansion and product rule give the same derivatives."""
        x = np.linspace(-1.0, 1.0, 13)
        for m in (1, 2):
            for j in range(2 * m, 11):
                poly = gjp_to_legendre(m, j, 12)
                for k in range(m + 1):
                    assert np.allclose(poly(x, k), gjp_eval(m, j, x, k), atol=1e-10), f"m={m} j={j} k={k}"

    def test_index_above_degree(self):
        with pytest.raises(DiscretizationError, match="exceeds"):
            gjp_to_legendre(2, 9, 8)

    def test_padding(self):
        poly = PolyInLegendre(np.array([1.0, 2.0]))
        assert poly.padded(4).coeffs.tolist() == [1.0, 2.0, 0.0, 0.0]
        with pytest.raises(DiscretizationError):
            poly.padded(1)


class TestGaussLegendre:
    """Tests for the quadrature rules."""

    def test_small_rules(self):
        one = gauss_legendre(1)
        assert one.nodes.tolist() == [0.0]
        assert one.weights.tolist() == [2.0]

        two = gauss_legendre(2)
        assert np.allclose(two.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)])
        assert np.allclose(two.weights, [1.0, 1.0])

    def test_exactness(self):
        """Q points integrate monomials through degree 2Q - 1."""
        rule = gauss_legendre(8)
        assert np.sum(rule.weights) == pytest.approx(2.0)
        for p in range(16):
            exact = 0.0 if p % 2 else 2.0 / (p + 1)
            assert np.sum(rule.weights * rule.nodes**p) == pytest.approx(exact, abs=1e-14)

    def test_legendre_orthogonality(self):
        rule = gauss_legendre(12)
        table = np.array([legendre_eval(n, rule.nodes) for n in range(11)])
        gram = (table * rule.weights) @ table.T
        assert np.allclose(gram, np.diag(2.0 / (2 * np.arange(11) + 1)), atol=1e-13)

    def test_mapped_rule(self):
        rule = gauss_legendre(4).mapped(0.0, 0.5)
        assert np.sum(rule.weights) == pytest.approx(0.5)
        assert np.all((rule.nodes > 0.0) & (rule.nodes < 0.5))

    def test_nodes_sorted_and_read_only(self):
        rule = gauss_legendre(9)
        assert np.all(np.diff(rule.nodes) > 0)
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0

    def test_invalid_order(self):
        with pytest.raises(DiscretizationError, match="at least one point"):
            gauss_legendre(0)
