"""
Legendre, Jacobi and generalized Jacobi polynomials plus Gauss-Legendre rules.

Conventions:
    - Jacobi polynomials use the hypergeometric normalization
      P_n^{a,b}(1) = binom(n + a, n); their squared weighted norms are
      given by gamma_norm.
    - The generalized Jacobi polynomial (GJP) of order m and index j >= 2m is
      (1 - x^2)^m P_{j-2m}^{m,m}(x). It vanishes with its first m - 1
      derivatives at both endpoints.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly
from scipy.special import binom, gamma, poch

from src.core.exceptions import DiscretizationError
from src.core.logging.logger_factory import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

NEWTON_TOL = 1e-15
NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi indices; `m` is the smoothness order for GJP evaluation."""

    alpha: float
    beta: float
    m: int = 1

    @classmethod
    def gjp(cls, m: int) -> "JacobiParams":
        if m < 1:
            raise DiscretizationError("GJP order must be >= 1", m=m)
        return cls(alpha=-m, beta=-m, m=m)

    @property
    def is_classical(self) -> bool:
        return self.alpha > -1 and self.beta > -1


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Gauss rule on an interval (the reference interval unless mapped)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def mapped(self, a: float, b: float) -> "QuadRule":
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        return QuadRule(nodes=half * self.nodes + mid, weights=half * self.weights, order=self.order)


@dataclass(frozen=True, eq=False)
class PolyInLegendre:
    """Polynomial stored by its Legendre coefficients c_0..c_N."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        nonzero = np.nonzero(self.coeffs)[0]
        return int(nonzero[-1]) if nonzero.size else 0

    def padded(self, length: int) -> "PolyInLegendre":
        if length < self.coeffs.size:
            raise DiscretizationError("cannot shrink a coefficient vector", length=length)
        out = np.zeros(length)
        out[: self.coeffs.size] = self.coeffs
        return PolyInLegendre(out)

    def scaled(self, factor: float) -> "PolyInLegendre":
        return PolyInLegendre(factor * self.coeffs)

    def __call__(self, x: ArrayLike, k: int = 0) -> ArrayLike:
        c = npleg.legder(self.coeffs, k) if k else self.coeffs
        return npleg.legval(x, c)


def _check_classical(p: JacobiParams) -> None:
    if not p.is_classical:
        raise DiscretizationError(
            "classical Jacobi evaluation needs alpha, beta > -1; use gjp_eval for negative indices",
            alpha=p.alpha,
            beta=p.beta,
        )


def _jacobi_recurrence(n: int, a: float, b: float, x: np.ndarray) -> np.ndarray:
    """P_n^{a,b}(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = 0.5 * ((a - b) + (a + b + 2.0) * x)
    for k in range(1, n):
        s = 2 * k + a + b
        c1 = 2.0 * (k + 1) * (k + a + b + 1) * s
        c2 = (s + 1) * (a * a - b * b)
        c3 = (s + 1) * (s + 2) * s
        c4 = 2.0 * (k + a) * (k + b) * (s + 2)
        p_prev, p = p, ((c2 + c3 * x) * p - c4 * p_prev) / c1
    return p


def jacobi_eval(p: JacobiParams, n: int, x: ArrayLike, k: int = 0) -> ArrayLike:
    """k-th derivative of P_n^{alpha,beta} at x."""
    _check_classical(p)
    if n < 0 or k < 0:
        raise DiscretizationError("degree and derivative order must be non-negative", n=n, k=k)
    xa = np.asarray(x, dtype=float)
    if k > n:
        out = np.zeros_like(xa)
    else:
        # d^k P_n^{a,b} = (n+a+b+1)_k / 2^k * P_{n-k}^{a+k,b+k}
        factor = poch(n + p.alpha + p.beta + 1, k) / 2.0**k
        out = factor * _jacobi_recurrence(n - k, p.alpha + k, p.beta + k, xa)
    return out if out.ndim else float(out)


def legendre_eval(n: int, x: ArrayLike, k: int = 0) -> ArrayLike:
    """k-th derivative of the Legendre polynomial L_n at x."""
    return jacobi_eval(JacobiParams(0.0, 0.0), n, x, k)


def gamma_norm(p: JacobiParams, j: int) -> float:
    """Squared norm of P_j^{alpha,beta} under the weight (1-x)^alpha (1+x)^beta."""
    _check_classical(p)
    a, b = p.alpha, p.beta
    num = 2.0 ** (a + b + 1) * gamma(j + a + 1) * gamma(j + b + 1)
    if j == 0:
        # (a+b+1) Gamma(a+b+1) = Gamma(a+b+2) also covers a + b = -1
        return float(num / gamma(a + b + 2))
    return float(num / ((2 * j + a + b + 1) * gamma(j + 1) * gamma(j + a + b + 1)))


@lru_cache(maxsize=None)
def _weight_factor(m: int) -> np.ndarray:
    """Monomial coefficients of (1 - x^2)^m."""
    return nppoly.polypow([1.0, 0.0, -1.0], m)


def gjp_eval(m: int, j: int, x: ArrayLike, k: int = 0) -> ArrayLike:
    """k-th derivative of the GJP (1 - x^2)^m P_{j-2m}^{m,m} by the product rule."""
    if m < 1:
        raise DiscretizationError("GJP order must be >= 1", m=m)
    if j < 2 * m:
        raise DiscretizationError("GJP index must satisfy j >= 2m", m=m, j=j)
    if k < 0:
        raise DiscretizationError("derivative order must be non-negative", k=k)
    xa = np.asarray(x, dtype=float)
    params = JacobiParams(float(m), float(m), m)
    weight = _weight_factor(m)
    out = np.zeros_like(xa)
    for i in range(k + 1):
        if i > 2 * m:
            break
        dw = nppoly.polyval(xa, nppoly.polyder(weight, i)) if i else nppoly.polyval(xa, weight)
        out = out + binom(k, i) * dw * jacobi_eval(params, j - 2 * m, xa, k - i)
    return out if out.ndim else float(out)


def compact_legendre_scale(j: int) -> float:
    """
    Factor turning the m = 2 GJP of index j into the compact combination
    (2j-1) L_{j-4} - 2(2j-3) L_{j-2} + (2j-5) L_j.
    """
    if j < 4:
        raise DiscretizationError("compact combination needs j >= 4", j=j)
    return (2 * j - 1) * (2 * j - 3) * (2 * j - 5) / (4.0 * (j - 2) * (j - 3))


def gjp_to_legendre(m: int, j: int, N: int) -> PolyInLegendre:
    """Legendre coefficients (length N + 1) of the GJP of order m and index j."""
    if j > N:
        raise DiscretizationError("GJP index exceeds the maximal degree", j=j, N=N)
    rule = gauss_legendre(N + 1)
    values = gjp_eval(m, j, rule.nodes)
    basis = npleg.legvander(rule.nodes, N)
    scale = (2.0 * np.arange(N + 1) + 1.0) / 2.0
    coeffs = scale * (basis.T @ (rule.weights * values))
    # exact support: parity of j, degree <= j
    coeffs[j + 1:] = 0.0
    coeffs[(np.arange(N + 1) - j) % 2 == 1] = 0.0
    return PolyInLegendre(coeffs)


def _legendre_with_derivative(Q: int, x: np.ndarray):
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, Q):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = Q * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=256)
def gauss_legendre(Q: int) -> QuadRule:
    """Q-point Gauss-Legendre rule by Newton iteration on the Legendre recurrence."""
    if Q < 1:
        raise DiscretizationError("quadrature needs at least one point", Q=Q)
    if Q == 1:
        return QuadRule(nodes=np.array([0.0]), weights=np.array([2.0]), order=1)

    i = np.arange(Q)
    x = np.cos(np.pi * (i + 0.75) / (Q + 0.5))
    for _ in range(NEWTON_MAX_ITER):
        p, dp = _legendre_with_derivative(Q, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < NEWTON_TOL:
            break
    else:
        logger.warning(f"Gauss-Legendre Newton iteration stopped at the iteration cap for Q={Q}")

    _, dp = _legendre_with_derivative(Q, x)
    weights = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    nodes = x[order]
    weights = weights[order]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes=nodes, weights=weights, order=Q)
