"""
Tests for basis dumps and mesh reports.
"""

import numpy as np
import pytest

from src.core.config import Settings
from src.core.exceptions import DiscretizationError
from src.core.spectral.basis1d import build_basis
from src.core.spectral.mesh import BoxDomain, build_mesh
from src.repositories.artifact_repository import ArtifactRepository
from src.schemas.run_config import parse_config
from src.services.inspection_service import (
    InspectionService,
    basis_rows,
    coefficient_columns,
    coefficient_rows,
    mesh_report,
    normalization_factors,
)
from tests.fixtures.reference_fixtures import ReferenceDomains


class TestBasisDump:
    """Tests for basis tabulation."""

    def setup_method(self):
        self.basis = build_basis(2, 6)

    def test_normalization_factors(self):
        assert np.all(normalization_factors(self.basis, "jacobi") == 1.0)
        compact = normalization_factors(self.basis, "compact")
        assert compact[:4].tolist() == [1.0, 1.0, 1.0, 1.0]
        assert compact[4] == pytest.approx(13.125)

    def test_compact_needs_m2(self):
        with pytest.raises(DiscretizationError, match="m = 2"):
            normalization_factors(build_basis(1, 4), "compact")
        with pytest.raises(DiscretizationError, match="unknown normalization"):
            normalization_factors(self.basis, "orthonormal")

    def test_rows(self):
        rows = basis_rows(self.basis, 5, "compact")
        assert len(rows) == 3 * 7 * 5
        centre = [r for r in rows if r["j"] == 4 and r["derivative"] == 0 and r["x"] == 0.0]
        assert centre[0]["value"] == pytest.approx(13.125)
        assert centre[0]["kind"] == "bubble"

    def test_coefficient_rows(self):
        rows = coefficient_rows(self.basis, "compact")
        assert coefficient_columns(self.basis) == ["j", "degree"] + [f"c_{i}" for i in range(7)]
        assert rows[4]["degree"] == 4
        assert [rows[4][f"c_{i}"] for i in (0, 2, 4)] == pytest.approx([7.0, -10.0, 3.0])
        assert rows[0]["degree"] == 3


class TestMeshReport:
    def test_l_shape_3d(self):
        mesh = build_mesh(BoxDomain.from_boxes(ReferenceDomains.L_SHAPE_3D))
        report = mesh_report(mesh, 2, 4)
        assert report["elements"] == 7
        assert report["dof_free"] == 37
        assert report["dof_doubled"] == 74
        assert report["h"] == pytest.approx(np.sqrt(3.0))
        assert [row["dim"] for row in report["entities"]] == [0, 1, 2, 3]


class TestInspectionService:
    """Tests for configuration-driven inspection runs."""

    def setup_method(self):
        self.service = InspectionService(settings=Settings())

    def test_run_basis_dump(self, tmp_path):
        config = parse_config('command = "basis-dump"\ngrid = 3\n[discretization]\nN = 5\n')
        rows = self.service.run_basis_dump(config, ArtifactRepository(tmp_path))
        assert len(rows) == 3 * 6 * 3
        lines = (tmp_path / "basis.csv").read_text().splitlines()
        assert lines[1] == "j,kind,derivative,x,value"
        coefficients = (tmp_path / "basis_coefficients.csv").read_text().splitlines()
        assert coefficients[1] == "j,degree,c_0,c_1,c_2,c_3,c_4,c_5"
        assert len(coefficients) == 2 + 6
        assert "functions = 6 (4 nodal, 2 bubble)" in (tmp_path / "report.txt").read_text()

    def test_run_mesh_info(self, tmp_path):
        config = parse_config(
            'command = "mesh-info"\n[domain]\nboxes = [[[0, 1], [0, 1]]]\n[discretization]\nN = 5\nlevel = 1\n'
        )
        report = self.service.run_mesh_info(config, ArtifactRepository(tmp_path))
        assert report["elements"] == 4
        assert report["dof_free"] == 4 * 4 + 4 * 2 * 2 + 4
        text = (tmp_path / "report.txt").read_text()
        assert "dof per field = 36" in text
        assert (tmp_path / "mesh.csv").read_text().splitlines()[1] == "dim,total,interior,boundary"

        dofs = (tmp_path / "dofs.csv").read_text().splitlines()
        assert dofs[1] == "entity_dim,entity_id,index,global_id,constrained"
        assert len(dofs) == 2 + report["dof_total"]
        assert sum(line.rsplit(",", 1)[1] == "0" for line in dofs[2:]) == 36
