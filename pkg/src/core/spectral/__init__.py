"""
Spectral element kernel: orthogonal polynomials, 1-D bases, box meshes,
conforming dof numbering, interpolation, pencil assembly and eigensolvers.
"""

from .assembly import BlockPencil, Coefficient, assemble_pencil, apply_pencil, element_matrices
from .basis1d import Basis1D, BasisTable, ScaledBasis1D, build_basis, build_nodal, scale_basis, tabulate
from .dofmap import DofMap, build_dofmap, clamp_boundary, conformity_check
from .eigsolver import EigenResult, EigOptions, residual_check, solve, solve_dense, solve_shift_invert
from .interp import SmoothFunction, interp_1d, interp_global, interp_tensor, pi1, pi2, sobolev_error
from .mesh import BoxDomain, BoxMesh, build_mesh, element_diameter
from .orthopoly import (
    JacobiParams,
    PolyInLegendre,
    QuadRule,
    gamma_norm,
    gauss_legendre,
    gjp_eval,
    gjp_to_legendre,
    jacobi_eval,
    legendre_eval,
)

__all__ = [
    "Basis1D",
    "BasisTable",
    "BlockPencil",
    "BoxDomain",
    "BoxMesh",
    "Coefficient",
    "DofMap",
    "EigenResult",
    "EigOptions",
    "JacobiParams",
    "PolyInLegendre",
    "QuadRule",
    "ScaledBasis1D",
    "SmoothFunction",
    "apply_pencil",
    "assemble_pencil",
    "build_basis",
    "build_dofmap",
    "build_mesh",
    "build_nodal",
    "clamp_boundary",
    "conformity_check",
    "element_diameter",
    "element_matrices",
    "gamma_norm",
    "gauss_legendre",
    "gjp_eval",
    "gjp_to_legendre",
    "interp_1d",
    "interp_global",
    "interp_tensor",
    "jacobi_eval",
    "legendre_eval",
    "pi1",
    "pi2",
    "residual_check",
    "scale_basis",
    "sobolev_error",
    "solve",
    "solve_dense",
    "solve_shift_invert",
    "tabulate",
]
