"""
One-dimensional H^m-conforming basis of P_N on an interval.

Indices 0..m-1 carry the derivatives 0..m-1 at the left endpoint, indices
m..2m-1 the derivatives at the right endpoint, and indices 2m..N are GJP
bubbles. On a physical interval [a, b] nodal functions are rescaled by
h_half^j so that their physical derivatives at the endpoints are exactly the
identity; bubbles are left unscaled.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import legendre as npleg

from src.core.exceptions import DiscretizationError
from src.core.spectral.orthopoly import (
    PolyInLegendre,
    QuadRule,
    gjp_to_legendre,
    legendre_eval,
)

NODAL_RESIDUAL_TOL = 1e-10


def _endpoint_conditions(m: int) -> np.ndarray:
    """Rows: d^s/dx^s at -1 for s < m, then at +1; columns: L_0..L_{2m-1}."""
    rows = []
    for point in (-1.0, 1.0):
        for s in range(m):
            rows.append([legendre_eval(l, point, s) for l in range(2 * m)])
    return np.array(rows)


def build_nodal(m: int) -> Tuple[PolyInLegendre, ...]:
    """The 2m Hermite-type nodal polynomials of degree <= 2m - 1."""
    if m < 1:
        raise DiscretizationError("smoothness order must be >= 1", m=m)
    conditions = _endpoint_conditions(m)
    coeffs = scipy.linalg.solve(conditions, np.eye(2 * m))
    residual = np.max(np.abs(conditions @ coeffs - np.eye(2 * m)))
    if residual > NODAL_RESIDUAL_TOL:
        raise DiscretizationError("nodal endpoint system solved inaccurately", m=m, residual=residual)
    return tuple(PolyInLegendre(coeffs[:, i].copy()) for i in range(2 * m))


@dataclass(frozen=True, eq=False)
class Basis1D:
    """Reference basis on [-1, 1]; every function padded to N + 1 coefficients."""

    m: int
    N: int
    funcs: Tuple[PolyInLegendre, ...]

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def nodal_indices(self) -> range:
        return range(2 * self.m)

    @property
    def bubble_indices(self) -> range:
        return range(2 * self.m, self.N + 1)

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """Row j holds the Legendre coefficients of function j."""
        return np.vstack([f.coeffs for f in self.funcs])

    def values(self, x: np.ndarray, s: int = 0) -> np.ndarray:
        """d^s phi_j(x) for all j: array of shape (N + 1, len(x))."""
        c = self.coefficient_matrix.T
        if s:
            c = npleg.legder(c, s, axis=0)
        return npleg.legval(np.asarray(x, dtype=float), c, tensor=True)


def build_basis(m: int, N: int) -> Basis1D:
    if m < 1:
        raise DiscretizationError("smoothness order must be >= 1", m=m)
    if N < 2 * m - 1:
        raise DiscretizationError("degree must satisfy N >= 2m - 1", m=m, N=N)
    return _cached_basis(m, N)


@lru_cache(maxsize=64)
def _cached_basis(m: int, N: int) -> Basis1D:
    nodal = [f.padded(N + 1) for f in build_nodal(m)]
    bubbles = [gjp_to_legendre(m, j, N) for j in range(2 * m, N + 1)]
    return Basis1D(m=m, N=N, funcs=tuple(nodal + bubbles))


@dataclass(frozen=True, eq=False)
class ScaledBasis1D:
    base: Basis1D
    a: float
    b: float

    @property
    def h_half(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.b + self.a)

    @property
    def factors(self) -> np.ndarray:
        m = self.base.m
        powers = np.zeros(self.base.size)
        powers[:m] = np.arange(m)
        powers[m:2 * m] = np.arange(m)
        return self.h_half ** powers

    def to_reference(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.midpoint) / self.h_half

    def values(self, x: np.ndarray, s: int = 0) -> np.ndarray:
        """Physical d^s phi_j(x): array of shape (N + 1, len(x))."""
        ref = self.base.values(self.to_reference(x), s)
        return (self.factors * self.h_half ** (-s))[:, None] * ref


def scale_basis(b: Basis1D, a: float, bnd: float) -> ScaledBasis1D:
    if not a < bnd:
        raise DiscretizationError("interval must satisfy a < b", a=a, b=bnd)
    return ScaledBasis1D(base=b, a=float(a), b=float(bnd))


@dataclass(frozen=True, eq=False)
class BasisTable:
    """values[s, j, q] = d^s phi_j at the mapped node q."""

    values: np.ndarray
    rule: QuadRule

    @property
    def max_deriv(self) -> int:
        return self.values.shape[0] - 1


def tabulate(sb: ScaledBasis1D, rule: QuadRule, max_deriv: int) -> BasisTable:
    mapped = rule.mapped(sb.a, sb.b)
    values = np.stack([sb.values(mapped.nodes, s) for s in range(max_deriv + 1)])
    return BasisTable(values=values, rule=mapped)
