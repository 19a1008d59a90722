"""
Inspection Service for basis dumps and mesh reports.
"""

from typing import Any, Dict, List, Optional

import numpy as np

from src.core.config import Settings, get_settings
from src.core.exceptions import DiscretizationError
from src.core.logging.logger_factory import get_logger
from src.core.spectral.basis1d import Basis1D, build_basis
from src.core.spectral.dofmap import build_dofmap, clamp_boundary, dof_report
from src.core.spectral.mesh import BoxDomain, BoxMesh, build_mesh, mesh_summary
from src.core.spectral.orthopoly import compact_legendre_scale
from src.repositories.artifact_repository import ArtifactRepository
from src.schemas.run_config import RunConfig, emit_config

logger = get_logger(__name__)

BASIS_COLUMNS = ["j", "kind", "derivative", "x", "value"]
MESH_COLUMNS = ["dim", "total", "interior", "boundary"]
DOF_COLUMNS = ["entity_dim", "entity_id", "index", "global_id", "constrained"]


def normalization_factors(basis: Basis1D, normalization: str) -> np.ndarray:
    """Per-function factors: ones for the raw GJP bubbles, the compact scaling otherwise."""
    factors = np.ones(basis.size)
    if normalization == "jacobi":
        return factors
    if normalization != "compact":
        raise DiscretizationError(f"unknown normalization '{normalization}'")
    if basis.m != 2:
        raise DiscretizationError("compact normalization exists for m = 2 only", m=basis.m)
    for j in basis.bubble_indices:
        factors[j] = compact_legendre_scale(j)
    return factors


def basis_rows(basis: Basis1D, samples: int, normalization: str = "jacobi") -> List[Dict[str, Any]]:
    """Values and derivatives 0..m of every reference basis function on a uniform grid."""
    x = np.linspace(-1.0, 1.0, samples)
    factors = normalization_factors(basis, normalization)
    rows = []
    for s in range(basis.m + 1):
        table = factors[:, None] * basis.values(x, s)
        for j in range(basis.size):
            kind = "nodal" if j < 2 * basis.m else "bubble"
            rows.extend(
                {"j": j, "kind": kind, "derivative": s, "x": float(xi), "value": float(val)}
                for xi, val in zip(x, table[j])
            )
    return rows


def coefficient_columns(basis: Basis1D) -> List[str]:
    return ["j", "degree"] + [f"c_{i}" for i in range(basis.size)]


def coefficient_rows(basis: Basis1D, normalization: str = "jacobi") -> List[Dict[str, Any]]:
    """Legendre coefficients of every function under the chosen normalization."""
    factors = normalization_factors(basis, normalization)
    rows = []
    for j, func in enumerate(basis.funcs):
        row: Dict[str, Any] = {"j": j, "degree": func.degree}
        row.update({f"c_{i}": float(factors[j] * c) for i, c in enumerate(func.coeffs)})
        rows.append(row)
    return rows


def mesh_report(mesh: BoxMesh, m: int, N: int) -> Dict[str, Any]:
    dofmap = clamp_boundary(build_dofmap(mesh, m, N), mesh)
    return {
        "elements": mesh.n_elements,
        "h": mesh.h,
        "entities": mesh_summary(mesh),
        "dof_total": dofmap.total,
        "dof_free": dofmap.n_free,
        "dof_doubled": 2 * dofmap.n_free,
        "dofs": dof_report(dofmap, mesh),
    }


class InspectionService:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.logger = get_logger(f"{__name__}.{self.__class__.__name__}")

    def run_basis_dump(self, config: RunConfig, repository: ArtifactRepository) -> List[Dict[str, Any]]:
        disc = config.discretization
        basis = build_basis(disc.m, disc.degrees[0])
        rows = basis_rows(basis, config.grid, config.basis.normalization)
        repository.write_table("basis.csv", BASIS_COLUMNS, rows)
        repository.write_table(
            "basis_coefficients.csv", coefficient_columns(basis), coefficient_rows(basis, config.basis.normalization)
        )
        repository.write_report(
            "report.txt",
            ["# configuration", *emit_config(config).splitlines(), "",
             f"functions = {basis.size} ({2 * basis.m} nodal, {basis.size - 2 * basis.m} bubble)"],
        )
        return rows

    def run_mesh_info(self, config: RunConfig, repository: ArtifactRepository) -> Dict[str, Any]:
        domain = BoxDomain.from_boxes(config.domain.boxes)
        disc = config.discretization
        mesh = build_mesh(domain, disc.levels[0])
        report = mesh_report(mesh, disc.m, disc.degrees[0])
        repository.write_table("mesh.csv", MESH_COLUMNS, report["entities"])
        repository.write_table("dofs.csv", DOF_COLUMNS, report["dofs"])
        lines = ["# configuration", *emit_config(config).splitlines(), ""]
        lines += [
            f"elements = {report['elements']}",
            f"h = {report['h']:.15g}",
            f"dof total = {report['dof_total']}",
            f"dof per field = {report['dof_free']}",
            f"dof doubled = {report['dof_doubled']}",
        ]
        lines += [f"dim {r['dim']}: {r['total']} entities, {r['interior']} interior" for r in report["entities"]]
        repository.write_report("report.txt", lines)
        return report
