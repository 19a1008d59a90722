"""
Interpolation onto the conforming space and Sobolev error measurement.

In one direction the interpolant is Pi1 v + Pi2 (v - Pi1 v): Pi1 matches the
derivatives through m - 1 at both endpoints, Pi2 is the projection onto the
bubbles in the H^m seminorm, which is diagonal because the m-th derivatives of
the bubbles are orthogonal. On a box the 1-D operators are applied along each
axis of a tensor of derivative samples.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as nppoly

from src.core.exceptions import DiscretizationError, InterpolationError
from src.core.logging.logger_factory import get_logger
from src.core.spectral.basis1d import Basis1D, ScaledBasis1D, tabulate
from src.core.spectral.dofmap import DofMap
from src.core.spectral.mesh import BoxMesh
from src.core.spectral.orthopoly import QuadRule, gauss_legendre
from src.core.spectral.tensor import (
    Box,
    element_bases,
    evaluate_grid,
    evaluate_points,
    grid_points,
    multi_indices,
)

logger = get_logger(__name__)

ENDPOINT_TOL = 1e-8
SHARED_DOF_TOL = 1e-10
EXTRA_QUADRATURE = 6

Evaluator = Callable[[Tuple[int, ...], np.ndarray], np.ndarray]
Factor1D = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class SmoothFunction:
    """
    A function of d variables with analytic partial derivatives.

    evaluator(alpha, points) returns d^alpha v at points of shape (P, d).
    """

    dim: int
    evaluator: Evaluator
    name: str = "v"

    def derivative(self, alpha: Sequence[int], points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.asarray(self.evaluator(tuple(alpha), points), dtype=float)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.derivative((0,) * self.dim, points)

    @classmethod
    def separable(cls, factors: Sequence[Factor1D], name: str = "v") -> "SmoothFunction":
        """Product f_1(x_1) ... f_d(x_d) of univariate factors f(x, k)."""
        factors = tuple(factors)

        def evaluator(alpha, points):
            out = np.ones(points.shape[0])
            for k, f in enumerate(factors):
                out = out * f(points[:, k], alpha[k])
            return out

        return cls(dim=len(factors), evaluator=evaluator, name=name)

    @classmethod
    def polynomial(cls, coeffs: np.ndarray, name: str = "poly") -> "SmoothFunction":
        """Polynomial from a monomial coefficient tensor (coeffs[i, j, ...] of x^i y^j ...)."""
        coeffs = np.asarray(coeffs, dtype=float)
        d = coeffs.ndim
        evaluate = {1: nppoly.polyval, 2: nppoly.polyval2d, 3: nppoly.polyval3d}[d]

        def evaluator(alpha, points):
            c = coeffs
            for k, a in enumerate(alpha):
                if a:
                    c = nppoly.polyder(c, a, axis=k)
            if d == 1:
                return evaluate(points[:, 0], c)
            return evaluate(*[points[:, k] for k in range(d)], c)

        return cls(dim=d, evaluator=evaluator, name=name)

    @classmethod
    def from_expansion(cls, coeffs: np.ndarray, element: Box, basis: Basis1D, name: str = "u_h") -> "SmoothFunction":
        bases = element_bases(element, basis)

        def evaluator(alpha, points):
            return evaluate_points(coeffs, bases, points, alpha)

        return cls(dim=len(element), evaluator=evaluator, name=name)


def _sine(x: np.ndarray, k: int) -> np.ndarray:
    return np.pi ** k * np.sin(np.pi * x + 0.5 * k * np.pi)


def _exp(x: np.ndarray, k: int) -> np.ndarray:
    return np.exp(x)


def _power_factor(exponent: float, center: float) -> Factor1D:
    def f(x: np.ndarray, k: int) -> np.ndarray:
        coef = np.prod([exponent - i for i in range(k)]) if k else 1.0
        r = x - center
        return coef * np.abs(r) ** (exponent - k) * np.sign(r) ** k

    return f


def sine_product(d: int) -> SmoothFunction:
    return SmoothFunction.separable([_sine] * d, name="sine")


def exp_sum(d: int) -> SmoothFunction:
    return SmoothFunction.separable([_exp] * d, name="exp")


def power_product(d: int, exponent: float = 3.5, center: float = 1.0 / np.pi) -> SmoothFunction:
    """prod |x_i - c|^exponent: in H^t only for t < exponent + 1/2."""
    return SmoothFunction.separable([_power_factor(exponent, center)] * d, name="power")


def suite_function(name: str, d: int, exponent: float = 3.5) -> SmoothFunction:
    if name == "sine":
        return sine_product(d)
    if name == "exp":
        return exp_sum(d)
    if name == "power":
        return power_product(d, exponent)
    raise DiscretizationError(f"unknown test function '{name}'")


def default_rule(N: int) -> QuadRule:
    return gauss_legendre(N + EXTRA_QUADRATURE)


def _univariate(v: SmoothFunction, x: np.ndarray, k: int) -> np.ndarray:
    if v.dim != 1:
        raise DiscretizationError("one-dimensional operator needs a univariate function", dim=v.dim)
    return v.derivative((k,), np.asarray(x, dtype=float).reshape(-1, 1))


def pi1(v: SmoothFunction, sb: ScaledBasis1D) -> np.ndarray:
    """Endpoint derivative values: [v(a), ..., v^(m-1)(a), v(b), ..., v^(m-1)(b)]."""
    m = sb.base.m
    left = [float(_univariate(v, [sb.a], s)[0]) for s in range(m)]
    right = [float(_univariate(v, [sb.b], s)[0]) for s in range(m)]
    return np.array(left + right)


def pi2(v: SmoothFunction, sb: ScaledBasis1D, rule: Optional[QuadRule] = None) -> np.ndarray:
    """Bubble coefficients of the H^m-seminorm projection (indices 2m..N)."""
    m = sb.base.m
    rule = rule or default_rule(sb.base.N)
    endpoint = np.abs(pi1(v, sb))
    if endpoint.size and np.max(endpoint) > ENDPOINT_TOL:
        logger.warning(
            f"pi2 applied to a function with nonzero endpoint data (max {np.max(endpoint):.3e}); "
            "only its H^m_0 part is meaningful"
        )
    table = tabulate(sb, rule, m)
    psi = table.values[m, 2 * m:, :]
    weights = table.rule.weights
    dm_v = _univariate(v, table.rule.nodes, m)
    return (psi * weights) @ dm_v / np.einsum("jq,jq,q->j", psi, psi, weights)


def interp_1d(v: SmoothFunction, sb: ScaledBasis1D, rule: Optional[QuadRule] = None) -> np.ndarray:
    """All N + 1 coefficients: Pi1 v on nodal indices, Pi2 (v - Pi1 v) on bubbles."""
    m = sb.base.m
    nodal = pi1(v, sb)
    nodal_bases = (sb,)

    def remainder(alpha, points):
        expansion = np.zeros(sb.base.size)
        expansion[: 2 * m] = nodal
        return v.derivative(alpha, points) - evaluate_points(expansion, nodal_bases, points, alpha)

    bubbles = pi2(SmoothFunction(dim=1, evaluator=remainder, name=f"{v.name}-Pi1"), sb, rule)
    return np.concatenate([nodal, bubbles])


def interpolation_matrix(sb: ScaledBasis1D, rule: QuadRule) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    1-D interpolation as a linear map on derivative samples.

    Returns (positions, orders, F): sample i is d^{orders[i]} v at
    positions[i]; coefficients = F @ samples.
    """
    m, N = sb.base.m, sb.base.N
    table = tabulate(sb, rule, m)
    nodes, weights = table.rule.nodes, table.rule.weights
    positions = np.concatenate([np.full(m, sb.a), np.full(m, sb.b), nodes])
    orders = np.concatenate([np.arange(m), np.arange(m), np.full(nodes.size, m)])

    F = np.zeros((N + 1, 2 * m + nodes.size))
    F[: 2 * m, : 2 * m] = np.eye(2 * m)
    psi = table.values[m, 2 * m:, :]
    gram = np.einsum("jq,jq,q->j", psi, psi, weights)
    projected = psi * weights / gram[:, None]
    F[2 * m:, 2 * m:] = projected
    F[2 * m:, : 2 * m] = -projected @ table.values[m, : 2 * m, :].T
    return positions, orders, F


def _sample_tensor(v: SmoothFunction, samples) -> np.ndarray:
    shape = tuple(p.size for p, _, _ in samples)
    out = np.empty(shape)
    groups = []
    for positions, orders, _ in samples:
        groups.append({int(o): np.flatnonzero(orders == o) for o in np.unique(orders)})
    for alpha in product(*[sorted(g) for g in groups]):
        idx = [groups[k][a] for k, a in enumerate(alpha)]
        pts = grid_points([samples[k][0][idx[k]] for k in range(len(samples))])
        vals = v.derivative(alpha, pts).reshape([i.size for i in idx])
        out[np.ix_(*idx)] = vals
    return out


def interp_tensor(
    v: SmoothFunction,
    element: Box,
    basis: Basis1D,
    rule: Optional[QuadRule] = None,
    order: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Tensor coefficients (shape (N + 1,) * d) of the interpolant on one box."""
    if v.dim != len(element):
        raise DiscretizationError("function and element dimensions differ", dim=v.dim, element=len(element))
    rule = rule or default_rule(basis.N)
    samples = [interpolation_matrix(sb, rule) for sb in element_bases(element, basis)]
    coeffs = _sample_tensor(v, samples)
    for k in order if order is not None else range(len(element)):
        F = samples[k][2]
        coeffs = np.moveaxis(np.tensordot(F, coeffs, axes=([1], [k])), 0, k)
    return coeffs


def interp_global(
    v: SmoothFunction,
    mesh: BoxMesh,
    dofmap: DofMap,
    basis: Basis1D,
    rule: Optional[QuadRule] = None,
    workers: int = 1,
) -> np.ndarray:
    """Global coefficient vector; shared dofs must agree across elements."""
    rule = rule or default_rule(basis.N)

    def local(e: int) -> np.ndarray:
        return interp_tensor(v, mesh.element_box(e), basis, rule).ravel()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            locals_ = list(pool.map(local, range(mesh.n_elements)))
    else:
        locals_ = [local(e) for e in range(mesh.n_elements)]

    values = np.full(dofmap.total, np.nan)
    for e, coeffs in enumerate(locals_):
        ids = dofmap.element_dofs[e]
        previous = values[ids]
        seen = ~np.isnan(previous)
        if np.any(seen):
            gap = np.abs(previous[seen] - coeffs[seen])
            bound = SHARED_DOF_TOL * np.maximum(1.0, np.abs(previous[seen]))
            if np.any(gap > bound):
                raise InterpolationError(
                    "shared dofs received different values from neighbouring elements",
                    element=e,
                    max_gap=float(np.max(gap)),
                )
        values[ids] = coeffs
    return values


def sobolev_error(
    coeffs: np.ndarray,
    v: SmoothFunction,
    mesh: BoxMesh,
    dofmap: DofMap,
    basis: Basis1D,
    s: int,
    rule: Optional[QuadRule] = None,
) -> float:
    """Broken H^s norm of (u_h - v), summing all derivatives with |alpha| <= s."""
    if s < 0 or s > dofmap.m:
        raise DiscretizationError("norm order must satisfy 0 <= s <= m", s=s, m=dofmap.m)
    minimum = basis.N + EXTRA_QUADRATURE
    if rule is None or rule.order < minimum:
        rule = gauss_legendre(minimum)
    alphas = list(multi_indices(mesh.d, s))

    total = 0.0
    for e in range(mesh.n_elements):
        bases = element_bases(mesh.element_box(e), basis)
        tables = [tabulate(sb, rule, s) for sb in bases]
        points = grid_points([t.rule.nodes for t in tables])
        weights = grid_points([t.rule.weights for t in tables]).prod(axis=1)
        local = dofmap.local_coefficients(coeffs, e)
        for alpha in alphas:
            uh = evaluate_grid(local, [t.values[a] for t, a in zip(tables, alpha)]).ravel()
            exact = v.derivative(alpha, points)
            total += float(np.sum(weights * (uh - exact) ** 2))
    return float(np.sqrt(total))
