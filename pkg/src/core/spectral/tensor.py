"""
Tensor-product evaluation of element expansions.

An element expansion is a coefficient array C of shape (N + 1,) * d over the
tensor basis phi_{j_1}(x_1) ... phi_{j_d}(x_d) of one box.
"""

from typing import Sequence, Tuple

import numpy as np

from src.core.spectral.basis1d import Basis1D, ScaledBasis1D, scale_basis

Box = Tuple[Tuple[float, float], ...]


def element_bases(element: Box, basis: Basis1D) -> Tuple[ScaledBasis1D, ...]:
    return tuple(scale_basis(basis, lo, hi) for lo, hi in element)


def evaluate_points(
    coeffs: np.ndarray,
    bases: Sequence[ScaledBasis1D],
    points: np.ndarray,
    alpha: Sequence[int],
) -> np.ndarray:
    """d^alpha of the expansion at scattered points of shape (P, d)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    factors = [sb.values(points[:, k], alpha[k]) for k, sb in enumerate(bases)]
    out = np.einsum("i...,ip->...p", coeffs, factors[0])
    for V in factors[1:]:
        out = np.einsum("i...p,ip->...p", out, V)
    return out


def evaluate_grid(coeffs: np.ndarray, tables: Sequence[np.ndarray]) -> np.ndarray:
    """
    Contract the expansion with per-direction tables V_k[j, q]; the result has
    shape (Q_1, ..., Q_d) in direction order.
    """
    out = coeffs
    for V in tables:
        out = np.tensordot(out, V, axes=([0], [0]))
    return out


def grid_points(axes: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor grid of per-direction coordinates flattened to shape (P, d), C order."""
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def multi_indices(d: int, max_order: int, total: bool = True):
    """Derivative multi-indices with |alpha| <= max_order, or per-direction order <= max_order."""
    for alpha in np.ndindex(*([max_order + 1] * d)):
        if not total or sum(alpha) <= max_order:
            yield tuple(int(a) for a in alpha)
