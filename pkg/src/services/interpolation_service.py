"""
Interpolation Service for convergence studies of the conforming interpolant.

For every (N, level) of a sweep the suite function is interpolated into the
unclamped conforming space and its broken H^0, H^1, H^2 errors are measured.
Slopes are observed rates of the H^m error against h (level sweeps) or N
(degree sweeps).
"""

import math
import time
from typing import Any, Dict, List, Optional, Sequence

from src.core.config import Settings, get_settings
from src.core.logging.logger_factory import get_logger
from src.core.spectral.basis1d import build_basis
from src.core.spectral.dofmap import build_dofmap
from src.core.spectral.interp import SmoothFunction, interp_global, sobolev_error, suite_function
from src.core.spectral.mesh import BoxDomain, build_mesh
from src.repositories.artifact_repository import ArtifactRepository
from src.schemas.run_config import RunConfig, emit_config

logger = get_logger(__name__)

STUDY_COLUMNS = ["N", "level", "h", "dof", "err_h0", "err_h1", "err_h2", "slope"]
MAX_NORM_ORDER = 2


def observed_slope(err_prev: float, err: float, x_prev: float, x: float) -> float:
    """log(err_prev / err) / log(x_prev / x); NaN when undefined."""
    if err_prev <= 0 or err <= 0 or x_prev <= 0 or x <= 0 or x_prev == x:
        return float("nan")
    return math.log(err_prev / err) / math.log(x_prev / x)


def interpolation_study(
    v: SmoothFunction,
    domain: BoxDomain,
    m: int,
    degrees: Sequence[int],
    levels: Sequence[int],
    workers: int = 1,
) -> List[Dict[str, Any]]:
    rows: List[Dict[str, Any]] = []
    by_level = len(levels) > 1
    for N in degrees:
        basis = build_basis(m, N)
        for level in levels:
            start = time.perf_counter()
            mesh = build_mesh(domain, level)
            dofmap = build_dofmap(mesh, m, N)
            coeffs = interp_global(v, mesh, dofmap, basis, workers=workers)
            row: Dict[str, Any] = {"N": N, "level": level, "h": mesh.h, "dof": dofmap.total}
            for s in range(MAX_NORM_ORDER + 1):
                row[f"err_h{s}"] = sobolev_error(coeffs, v, mesh, dofmap, basis, s) if s <= m else float("nan")
            rows.append(row)
            logger.info(
                f"Interpolation N={N} level={level}: errors "
                f"{row['err_h0']:.3e} {row['err_h1']:.3e} {row['err_h2']:.3e} ({time.perf_counter() - start:.2f}s)"
            )

    key = f"err_h{min(m, MAX_NORM_ORDER)}"
    for i, row in enumerate(rows):
        row["slope"] = float("nan")
        if i == 0:
            continue
        prev = rows[i - 1]
        if by_level and prev["N"] == row["N"]:
            row["slope"] = observed_slope(prev[key], row[key], prev["h"], row["h"])
        elif not by_level:
            # error decreases with N, so the rate is taken against 1/N
            row["slope"] = observed_slope(prev[key], row[key], 1.0 / prev["N"], 1.0 / row["N"])
    return rows


class InterpolationService:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.logger = get_logger(f"{__name__}.{self.__class__.__name__}")

    def run_study(self, config: RunConfig, repository: ArtifactRepository) -> List[Dict[str, Any]]:
        domain = BoxDomain.from_boxes(config.domain.boxes)
        v = suite_function(config.interp.function, domain.d, config.interp.exponent)
        disc = config.discretization
        rows = interpolation_study(v, domain, disc.m, disc.degrees, disc.levels, workers=self.settings.SEM_WORKERS)
        repository.write_table("interp.csv", STUDY_COLUMNS, rows)
        lines = ["# configuration", *emit_config(config).splitlines(), "", "# interpolation errors"]
        lines += [
            f"N={r['N']} level={r['level']} h={r['h']:.6g} dof={r['dof']} "
            f"H0={r['err_h0']:.3e} H1={r['err_h1']:.3e} H2={r['err_h2']:.3e} slope={r['slope']:.3f}"
            for r in rows
        ]
        repository.write_report("report.txt", lines)
        return rows
