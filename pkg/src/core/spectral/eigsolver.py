"""
Generalized non-Hermitian eigensolvers for A x = lambda B x.

Two paths:
    dense   - QZ through scipy.linalg.eig in homogeneous form; pairs with a
              vanishing beta are infinite eigenvalues and are set aside.
    arnoldi - ARPACK on x -> (A - sigma B)^{-1} B x with a single sparse LU
              factorization; Ritz values theta map back to sigma + 1/theta and
              each Ritz vector gets one inverse iteration step.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from src.core.exceptions import DiscretizationError, SolverError
from src.core.logging.logger_factory import get_logger

logger = get_logger(__name__)

METHODS = ("auto", "dense", "arnoldi")
INFINITE_BETA = 1e-12


@dataclass(frozen=True)
class EigOptions:
    count: int = 8
    shift: complex = 0.0
    method: str = "auto"
    tol: float = 1e-10
    max_restarts: int = 2000
    subspace: Optional[int] = None
    dense_threshold: int = 3000
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise DiscretizationError("eigenvalue count must be >= 1", count=self.count)
        if self.method not in METHODS:
            raise DiscretizationError(f"unknown eigensolver method '{self.method}'", allowed=", ".join(METHODS))
        if self.subspace is not None and self.subspace <= self.count:
            raise DiscretizationError("subspace dimension must exceed the count", subspace=self.subspace)

    @property
    def ncv(self) -> int:
        return self.subspace or max(2 * self.count + 10, 30)


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    method: str
    converged: np.ndarray
    infinite: int = 0
    stats: Dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def subset(self, order: np.ndarray) -> "EigenResult":
        return replace(
            self,
            eigenvalues=self.eigenvalues[order],
            eigenvectors=self.eigenvectors[:, order],
            residuals=self.residuals[order],
            converged=self.converged[order],
        )

    def nearest(self, sigma: complex, count: int) -> "EigenResult":
        """The `count` pairs closest to sigma, sorted by distance."""
        order = np.argsort(np.abs(self.eigenvalues - sigma), kind="stable")[:count]
        return self.subset(order)


def _norm1(matrix) -> float:
    if sp.issparse(matrix):
        return float(spla.norm(matrix, 1))
    return float(np.linalg.norm(matrix, 1))


def residual_check(A, B, lam: complex, v: np.ndarray) -> float:
    """||A v - lam B v|| / ((||A||_1 + |lam| ||B||_1) ||v||)."""
    v = np.asarray(v)
    v_norm = np.linalg.norm(v)
    if v_norm == 0.0:
        raise DiscretizationError("residual of a zero vector is undefined")
    r = A @ v - lam * (B @ v)
    return float(np.linalg.norm(r) / ((_norm1(A) + abs(lam) * _norm1(B)) * v_norm))


def _residuals(A, B, lams: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    if lams.size == 0:
        return np.zeros(0)
    norm_a, norm_b = _norm1(A), _norm1(B)
    R = A @ vectors - (B @ vectors) * lams[None, :]
    scale = (norm_a + np.abs(lams) * norm_b) * np.linalg.norm(vectors, axis=0)
    return np.linalg.norm(R, axis=0) / scale


def _lu_solve(lu, rhs: np.ndarray, real_factor: bool) -> np.ndarray:
    if real_factor and np.iscomplexobj(rhs):
        return lu.solve(np.ascontiguousarray(rhs.real)) + 1j * lu.solve(np.ascontiguousarray(rhs.imag))
    return lu.solve(rhs)


def _polish(lu, B, theta: np.ndarray, vectors: np.ndarray, real_factor: bool) -> np.ndarray:
    """One inverse iteration step x <- (A - sigma B)^{-1} B x / theta, unit columns."""
    polished = _lu_solve(lu, B @ vectors, real_factor) / theta[None, :]
    return polished / np.linalg.norm(polished, axis=0)[None, :]


def _check_square(A, B) -> None:
    if A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise DiscretizationError("pencil matrices must be square and of equal size", A=A.shape, B=B.shape)


def solve_dense(A, B, opts: Optional[EigOptions] = None) -> EigenResult:
    """Full finite spectrum by QZ, sorted by |lambda|."""
    opts = opts or EigOptions()
    _check_square(A, B)
    Ad = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    Bd = B.toarray() if sp.issparse(B) else np.asarray(B, dtype=float)

    start = time.perf_counter()
    try:
        ab, vectors = scipy.linalg.eig(Ad, Bd, homogeneous_eigvals=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise SolverError(f"QZ iteration failed: {e}", dimension=Ad.shape[0])
    elapsed = time.perf_counter() - start

    alpha, beta = ab[0], ab[1]
    finite = np.abs(beta) >= INFINITE_BETA * np.maximum(1.0, np.abs(alpha))
    lams = alpha[finite] / beta[finite]
    vectors = vectors[:, finite]
    order = np.argsort(np.abs(lams), kind="stable")
    lams, vectors = lams[order], vectors[:, order]

    residuals = _residuals(Ad, Bd, lams, vectors)
    converged = residuals <= opts.tol
    infinite = int(np.count_nonzero(~finite))
    if not np.all(converged):
        logger.warning(f"Dense solve: {np.count_nonzero(~converged)} pairs exceed the residual tolerance {opts.tol:.1e}")
    logger.info(f"Dense QZ: dimension={Ad.shape[0]}, finite={lams.size}, infinite={infinite}, time={elapsed:.2f}s")
    return EigenResult(
        eigenvalues=lams,
        eigenvectors=vectors,
        residuals=residuals,
        method="dense",
        converged=converged,
        infinite=infinite,
        stats={"qz_time": elapsed},
    )


def solve_shift_invert(A, B, opts: Optional[EigOptions] = None) -> EigenResult:
    """The `count` eigenvalues nearest opts.shift, sorted by |lambda - sigma|."""
    opts = opts or EigOptions()
    _check_square(A, B)
    n = A.shape[0]
    sigma = complex(opts.shift)
    is_complex = sigma.imag != 0.0
    dtype = complex if is_complex else float
    shift = sigma if is_complex else sigma.real

    A = sp.csc_matrix(A, dtype=dtype)
    B = sp.csr_matrix(B, dtype=dtype)

    start = time.perf_counter()
    try:
        lu = spla.splu((A - shift * B).tocsc())
    except RuntimeError as e:
        raise SolverError(
            f"A - sigma B is singular at sigma = {sigma}; perturb the shift ({e})", shift=sigma
        )
    factor_time = time.perf_counter() - start

    matvecs = 0

    def apply(x):
        nonlocal matvecs
        matvecs += 1
        return lu.solve(B @ x)

    count = min(opts.count, n)
    converged_all = True
    start = time.perf_counter()
    if count >= n - 1:
        logger.debug(f"Shift-invert: dimension {n} too small for ARPACK, using the dense operator")
        op_matrix = lu.solve(B.toarray())
        theta, vectors = scipy.linalg.eig(op_matrix)
        keep = np.argsort(-np.abs(theta), kind="stable")[:count]
        theta, vectors = theta[keep], vectors[:, keep]
        matvecs = n
    else:
        operator = spla.LinearOperator((n, n), matvec=apply, dtype=dtype)
        rng = np.random.default_rng(opts.seed)
        v0 = rng.standard_normal(n)
        if is_complex:
            v0 = v0 + 1j * rng.standard_normal(n)
        ncv = min(max(opts.ncv, count + 2), n)
        try:
            theta, vectors = spla.eigs(
                operator, k=count, which="LM", v0=v0, ncv=ncv, maxiter=opts.max_restarts, tol=0.0
            )
        except spla.ArpackNoConvergence as e:
            converged_all = False
            theta, vectors = e.eigenvalues, e.eigenvectors
            logger.warning(f"ARPACK stopped after {opts.max_restarts} restarts with {theta.size} converged values")
    arnoldi_time = time.perf_counter() - start

    if theta.size == 0:
        raise SolverError("shift-invert Arnoldi returned no eigenvalues", shift=sigma)
    nonzero = np.abs(theta) > 0
    theta = theta[nonzero]
    lams = sigma + 1.0 / theta
    vectors = np.asarray(vectors, dtype=complex)[:, nonzero]
    residuals = _residuals(A, B, lams, vectors)
    polished = _polish(lu, B, theta, vectors, not is_complex)
    polished_residuals = _residuals(A, B, lams, polished)
    better = polished_residuals < residuals
    vectors[:, better] = polished[:, better]
    residuals = np.where(better, polished_residuals, residuals)
    logger.debug(f"Shift-invert: polished {np.count_nonzero(better)} of {lams.size} Ritz vectors")

    order = np.argsort(np.abs(lams - sigma), kind="stable")
    lams, vectors = lams[order], vectors[:, order]
    residuals = residuals[order]
    converged = (residuals <= opts.tol) & converged_all
    if not np.all(converged):
        logger.warning(
            f"Shift-invert: {np.count_nonzero(~converged)} of {lams.size} pairs not converged to {opts.tol:.1e}"
        )
    logger.info(
        f"Shift-invert: dimension={n}, sigma={sigma}, count={lams.size}, matvecs={matvecs}, "
        f"factor={factor_time:.2f}s, arnoldi={arnoldi_time:.2f}s"
    )
    return EigenResult(
        eigenvalues=lams,
        eigenvectors=vectors,
        residuals=residuals,
        method="arnoldi",
        converged=converged,
        stats={"factor_time": factor_time, "arnoldi_time": arnoldi_time, "matvecs": float(matvecs)},
    )


def solve(A, B, opts: Optional[EigOptions] = None) -> EigenResult:
    """Dispatch on opts.method; the dense result is cut to the count nearest the shift."""
    opts = opts or EigOptions()
    method = opts.method
    if method == "auto":
        method = "dense" if A.shape[0] <= opts.dense_threshold else "arnoldi"
    logger.info(f"Eigensolver method: {method} (dimension {A.shape[0]})")
    if method == "dense":
        return solve_dense(A, B, opts).nearest(opts.shift, opts.count)
    return solve_shift_invert(A, B, opts)
