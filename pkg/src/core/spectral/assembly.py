"""
Matrix assembly for the transmission eigenvalue pencil (m = 2).

With a = 1/(n-1) and b = n/(n-1) = 1 + a the blocks are

    K  = (a lap u, lap v)
    G  = (grad(a u), grad v) + (grad u, grad(b v))
       = ((a + b) grad u, grad v) + (grad a, u grad v + v grad u)
    M  = (w, z),   C = (b w, v),   M0 = (u, z)

and the pencil is A = [[K, 0], [0, M]], B = [[G, -C], [M0, 0]].
Element blocks use sum factorization over the tensor quadrature grid; for a
constant coefficient they reduce to Kronecker products of 1-D matrices.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from src.core.exceptions import AssemblyError, CoefficientError, DiscretizationError
from src.core.logging.logger_factory import get_logger
from src.core.spectral.basis1d import Basis1D, BasisTable, tabulate
from src.core.spectral.dofmap import DofMap
from src.core.spectral.mesh import BoxMesh
from src.core.spectral.orthopoly import QuadRule, gauss_legendre
from src.core.spectral.tensor import Box, element_bases, grid_points
from src.core.validation.validators.coefficient_validator import MIN_CONTRAST, CoefficientValidator

logger = get_logger(__name__)

KINDS = ("constant", "affine", "exp-affine")
SPARSE_DROP = 1e-14
BLOCK_NAMES = ("K", "M", "G", "C", "M0")


@dataclass(frozen=True)
class Coefficient:
    """n(x) = c0 | c0 + c.x | c0 + exp(c.x)."""

    kind: str
    c0: float
    c: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DiscretizationError(f"unknown coefficient kind '{self.kind}'", allowed=", ".join(KINDS))
        if self.kind == "constant" and self.c:
            raise DiscretizationError("constant coefficient takes a single parameter")
        if self.kind != "constant" and not self.c:
            raise DiscretizationError(f"{self.kind} coefficient needs c0 and one slope per direction")

    @classmethod
    def constant(cls, value: float) -> "Coefficient":
        return cls("constant", float(value))

    @classmethod
    def parse(cls, text: str) -> "Coefficient":
        """'constant 16', 'affine 8 1 -1', 'exp-affine 4 1 1'."""
        parts = text.split()
        if len(parts) < 2:
            raise DiscretizationError(f"coefficient '{text}' needs a kind and parameters")
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError:
            raise DiscretizationError(f"coefficient '{text}' has non-numeric parameters")
        return cls(parts[0], values[0], tuple(values[1:]))

    def describe(self) -> str:
        return " ".join([self.kind] + [f"{v:.15g}" for v in (self.c0,) + self.c])

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @property
    def quadrature_extra(self) -> int:
        return 4 if self.kind == "exp-affine" else 2

    def _check_dim(self, points: np.ndarray) -> None:
        if not self.is_constant and points.shape[1] != len(self.c):
            raise DiscretizationError(
                "coefficient slopes do not match the dimension", slopes=len(self.c), dim=points.shape[1]
            )

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_constant:
            return np.full(points.shape[0], self.c0)
        self._check_dim(points)
        linear = points @ np.asarray(self.c)
        return self.c0 + (linear if self.kind == "affine" else np.exp(linear))

    def gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.is_constant:
            return np.zeros_like(points)
        self._check_dim(points)
        slopes = np.asarray(self.c)
        if self.kind == "affine":
            return np.tile(slopes, (points.shape[0], 1))
        return np.exp(points @ slopes)[:, None] * slopes


@dataclass(frozen=True, eq=False)
class ElementBlocks:
    K: object
    M: object
    G: object
    C: object
    M0: object


@dataclass(eq=False)
class BlockPencil:
    K: sp.csr_matrix
    M: sp.csr_matrix
    G: sp.csr_matrix
    C: sp.csr_matrix
    M0: sp.csr_matrix
    A: sp.csr_matrix = field(init=False)
    B: sp.csr_matrix = field(init=False)

    def __post_init__(self):
        self.A = sp.bmat([[self.K, None], [None, self.M]], format="csr")
        self.B = sp.bmat([[self.G, -self.C], [self.M0, None]], format="csr")

    @property
    def n_free(self) -> int:
        return self.K.shape[0]

    @property
    def dimension(self) -> int:
        return 2 * self.n_free

    def blocks(self):
        return [(name, getattr(self, name)) for name in BLOCK_NAMES]

    def balanced(self) -> Tuple[sp.csr_matrix, sp.csr_matrix, float]:
        """
        (A, B, s) for the unknowns (u, w / s) with s^2 = ||K||_1 / ||M||_1.
        Same eigenvalues; the w rows are brought to the size of the K rows.
        """
        s = float(np.sqrt(spla.norm(self.K, 1) / spla.norm(self.M, 1)))
        A = sp.bmat([[self.K, None], [None, (s * s) * self.M]], format="csr")
        B = sp.bmat([[self.G, -s * self.C], [s * self.M0, None]], format="csr")
        return A, B, s


def element_tables(element: Box, basis: Basis1D, rule: QuadRule, max_deriv: int = 2) -> List[BasisTable]:
    return [tabulate(sb, rule, max_deriv) for sb in element_bases(element, basis)]


def _weighted_product(weight: np.ndarray, left: Sequence[np.ndarray], right: Sequence[np.ndarray]) -> np.ndarray:
    """
    out[(i_1..i_d), (j_1..j_d)] = sum_q weight[q] prod_k left[k][i_k, q_k] right[k][j_k, q_k],
    contracted one direction at a time.
    """
    d = len(left)
    out = weight
    for k in reversed(range(d)):
        pair = left[k][:, None, :] * right[k][None, :, :]
        out = np.tensordot(out, pair, axes=([k], [2]))
    perm = [2 * (d - 1 - k) for k in range(d)] + [2 * (d - 1 - k) + 1 for k in range(d)]
    n = int(np.prod([f.shape[0] for f in left]))
    return out.transpose(perm).reshape(n, n)


def element_matrices(element: Box, tables: Sequence[BasisTable], coeff: Coefficient) -> ElementBlocks:
    """Dense local blocks by tensor quadrature."""
    d = len(tables)
    if any(t.max_deriv < 2 for t in tables):
        raise DiscretizationError("element tables need derivatives through order 2")
    shape = tuple(t.rule.order for t in tables)
    points = grid_points([t.rule.nodes for t in tables])
    weight = grid_points([t.rule.weights for t in tables]).prod(axis=1).reshape(shape)

    contrast = coeff.value(points) - 1.0
    if np.min(np.abs(contrast)) < MIN_CONTRAST:
        raise CoefficientError("|n - 1| vanishes at a quadrature point", element=element)
    a = (1.0 / contrast).reshape(shape)
    b = 1.0 + a
    grad_a = -coeff.gradient(points) / contrast[:, None] ** 2

    V = [t.values[0] for t in tables]
    D = [t.values[1] for t in tables]
    S = [t.values[2] for t in tables]

    def swap(base, k, replacement):
        factors = list(base)
        factors[k] = replacement[k]
        return factors

    K = sum(
        _weighted_product(weight * a, swap(V, k, S), swap(V, l, S))
        for k in range(d)
        for l in range(d)
    )
    G = sum(_weighted_product(weight * (a + b), swap(V, k, D), swap(V, k, D)) for k in range(d))
    if not coeff.is_constant:
        for k in range(d):
            wk = weight * grad_a[:, k].reshape(shape)
            G = G + _weighted_product(wk, swap(V, k, D), V) + _weighted_product(wk, V, swap(V, k, D))
    M = _weighted_product(weight, V, V)
    C = _weighted_product(weight * b, V, V)
    return ElementBlocks(K=K, M=M, G=G, C=C, M0=M.copy())


def _sparsified(matrix: np.ndarray) -> sp.csr_matrix:
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    kept = np.where(np.abs(matrix) > SPARSE_DROP * scale, matrix, 0.0)
    return sp.csr_matrix(kept)


def one_dimensional_matrices(table: BasisTable) -> dict:
    """Mass, first- and second-derivative and mixed matrices of one direction."""
    V, D, S = table.values[0], table.values[1], table.values[2]
    w = table.rule.weights
    return {
        "mass": (V * w) @ V.T,
        "grad": (D * w) @ D.T,
        "hess": (S * w) @ S.T,
        "mixed": (S * w) @ V.T,
    }


def kronecker_element_matrices(tables: Sequence[BasisTable], coeff: Coefficient) -> ElementBlocks:
    """Sparse local blocks for a constant coefficient as sums of Kronecker products."""
    if not coeff.is_constant:
        raise DiscretizationError("Kronecker assembly needs a constant coefficient")
    if abs(coeff.c0 - 1.0) < MIN_CONTRAST:
        raise CoefficientError("|n - 1| vanishes", n=coeff.c0)
    a = 1.0 / (coeff.c0 - 1.0)
    b = 1.0 + a
    d = len(tables)
    one_d = [{name: _sparsified(mat) for name, mat in one_dimensional_matrices(t).items()} for t in tables]

    def kron(factors):
        return reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)

    def factors_for(k: int, l: int):
        out = []
        for r in range(d):
            if r == k and r == l:
                out.append(one_d[r]["hess"])
            elif r == k:
                out.append(one_d[r]["mixed"])
            elif r == l:
                out.append(one_d[r]["mixed"].T.tocsr())
            else:
                out.append(one_d[r]["mass"])
        return out

    K = a * sum(kron(factors_for(k, l)) for k in range(d) for l in range(d))
    G = (a + b) * sum(
        kron([one_d[r]["grad"] if r == k else one_d[r]["mass"] for r in range(d)]) for k in range(d)
    )
    M = kron([one_d[r]["mass"] for r in range(d)])
    return ElementBlocks(K=K.tocsr(), M=M, G=G.tocsr(), C=(b * M).tocsr(), M0=M.copy())


def _triplets(local, ids: np.ndarray):
    if sp.issparse(local):
        coo = local.tocoo()
        rows, cols, data = ids[coo.row], ids[coo.col], coo.data
    else:
        r, c = np.nonzero(local)
        rows, cols, data = ids[r], ids[c], local[r, c]
    keep = (rows >= 0) & (cols >= 0)
    return rows[keep], cols[keep], data[keep]


def default_quadrature(basis: Basis1D, coeff: Coefficient) -> QuadRule:
    return gauss_legendre(basis.N + coeff.quadrature_extra)


def validate_coefficient(mesh: BoxMesh, coeff: Coefficient, rule: QuadRule) -> dict:
    """Run the coefficient sweep over every quadrature point of the mesh."""
    points = np.vstack(
        [
            grid_points([rule.mapped(lo, hi).nodes for lo, hi in mesh.element_box(e)])
            for e in range(mesh.n_elements)
        ]
    )
    result = CoefficientValidator().validate(coeff, points=points)
    if not result.is_valid:
        raise CoefficientError(f"invalid refraction index '{coeff.describe()}': {result.summary()}")
    return result.metadata


def assemble_pencil(
    mesh: BoxMesh,
    dofmap: DofMap,
    basis: Basis1D,
    coeff: Coefficient,
    rule: Optional[QuadRule] = None,
    workers: int = 1,
) -> BlockPencil:
    if dofmap.m != 2 or basis.m != 2:
        raise DiscretizationError("the transmission pencil is defined for m = 2", m=dofmap.m)
    if basis.N != dofmap.N:
        raise DiscretizationError("basis and dof map degrees differ", basis=basis.N, dofmap=dofmap.N)
    rule = rule or default_quadrature(basis, coeff)
    validate_coefficient(mesh, coeff, rule)

    free_index = dofmap.free_index
    n_free = dofmap.n_free

    def local(e: int) -> ElementBlocks:
        tables = element_tables(mesh.element_box(e), basis, rule)
        if coeff.is_constant:
            return kronecker_element_matrices(tables, coeff)
        return element_matrices(mesh.element_box(e), tables, coeff)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(local, range(mesh.n_elements)))
    else:
        blocks = [local(e) for e in range(mesh.n_elements)]

    assembled = {}
    for name in BLOCK_NAMES:
        rows, cols, data = [], [], []
        for e, eb in enumerate(blocks):
            r, c, v = _triplets(getattr(eb, name), free_index[dofmap.element_dofs[e]])
            rows.append(r)
            cols.append(c)
            data.append(v)
        matrix = sp.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n_free, n_free)
        ).tocsr()
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        assembled[name] = matrix

    pencil = BlockPencil(**assembled)
    logger.info(
        f"Assembled pencil: elements={mesh.n_elements}, N={basis.N}, Q={rule.order}, "
        f"free per field={n_free}, dimension={pencil.dimension}, nnz(A)={pencil.A.nnz}, nnz(B)={pencil.B.nnz}"
    )
    return pencil


def apply_pencil(p: BlockPencil, side: str, x: np.ndarray) -> np.ndarray:
    if side not in ("A", "B"):
        raise DiscretizationError("side must be 'A' or 'B'", side=side)
    x = np.asarray(x)
    if x.shape[0] != p.dimension:
        raise AssemblyError("vector length does not match the pencil", length=x.shape[0], dimension=p.dimension)
    return (p.A if side == "A" else p.B) @ x
