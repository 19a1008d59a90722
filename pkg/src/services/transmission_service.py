"""
Transmission Service for the Helmholtz transmission eigenvalue problem.

This service coordinates the end-to-end flow:
- mesh, conforming H^2 space with clamped boundary, pencil assembly
- eigensolve near the shift sigma = (0.8 k_guess)^2
- mapping lambda -> k = sqrt(lambda), linearization checks, dof report
- sanity checks (translation, scaling), eigenfunction dumps and sweeps
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.config import Settings, get_settings
from src.core.exceptions import DiscretizationError, SolverError
from src.core.logging.logger_factory import get_logger
from src.core.spectral.assembly import BlockPencil, Coefficient, assemble_pencil, default_quadrature
from src.core.spectral.basis1d import Basis1D, build_basis
from src.core.spectral.dofmap import DofMap, build_dofmap, clamp_boundary
from src.core.spectral.eigsolver import EigOptions, solve
from src.core.spectral.mesh import BoxDomain, BoxMesh, build_mesh
from src.core.spectral.orthopoly import gauss_legendre
from src.core.spectral.tensor import element_bases, evaluate_grid, grid_points
from src.core.validation.validators.discretization_validator import DiscretizationValidator
from src.repositories.artifact_repository import ArtifactRepository
from src.schemas.run_config import RunConfig, emit_config

logger = get_logger(__name__)

ZERO_LAMBDA = 1e-8
DEFECT_TOL = 1e-6
SHIFT_FACTOR = 0.8
INVARIANCE_COUNT = 4
RESOLVE_ATTEMPTS = 3


@dataclass(frozen=True)
class ProblemSpec:
    """
    One discrete transmission problem. shift overrides the default
    sigma = (0.8 k_guess)^2 when given.
    """

    domain: BoxDomain
    N: int
    coefficient: Coefficient
    level: int = 0
    eig: EigOptions = field(default_factory=EigOptions)
    k_guess: float = 2.0
    shift: Optional[complex] = None
    quadrature: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        result = DiscretizationValidator().validate(
            {"m": 2, "N": self.N, "level": self.level, "d": self.domain.d, "problem": "transmission"}
        )
        if not result.is_valid:
            raise DiscretizationError(f"invalid transmission problem: {result.summary()}")
        for warning in result.warnings:
            logger.warning(warning)
        if self.k_guess <= 0:
            raise DiscretizationError("k_guess must be positive", k_guess=self.k_guess)

    @property
    def sigma(self) -> complex:
        if self.shift is not None:
            return complex(self.shift)
        return complex((SHIFT_FACTOR * self.k_guess) ** 2)


@dataclass(frozen=True, eq=False)
class TransmissionResult:
    """
    Wavenumbers sorted by (Re k, -Im k) so the "+" member of a conjugate pair
    comes first; u[:, j] and w[:, j] are the free-dof field components.
    """

    spec: ProblemSpec
    wavenumbers: np.ndarray
    eigenvalues: np.ndarray
    u: np.ndarray
    w: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    defects: np.ndarray
    dofs: Dict[str, int]
    timings: Dict[str, float]
    method: str
    mesh: BoxMesh
    dofmap: DofMap
    basis: Basis1D
    pencil: BlockPencil

    def __len__(self) -> int:
        return self.wavenumbers.size


def wavenumbers_from(lams: np.ndarray) -> np.ndarray:
    """Principal square root with Re k >= 0; purely imaginary k get Im k >= 0."""
    k = np.sqrt(np.asarray(lams, dtype=complex))
    flip = (k.real == 0.0) & (k.imag < 0.0)
    k[flip] = -k[flip]
    return k


def wavenumber_order(k: np.ndarray) -> np.ndarray:
    # conjugate partners differ in Re k only by rounding
    return np.lexsort((-k.imag, np.round(k.real, 10)))


def _m_norm(M, v: np.ndarray) -> float:
    return float(np.sqrt(max(np.real(np.vdot(v, M @ v)), 0.0)))


def linearization_defect(M, u: np.ndarray, w: np.ndarray, lam: complex) -> float:
    """||w - lambda u||_M / ||w||_M."""
    w_norm = _m_norm(M, w)
    if w_norm == 0.0:
        return float("inf")
    return _m_norm(M, w - lam * u) / w_norm


def discretize(spec: ProblemSpec):
    """Mesh, basis, clamped dof map and pencil of a problem."""
    mesh = build_mesh(spec.domain, spec.level)
    basis = build_basis(2, spec.N)
    dofmap = clamp_boundary(build_dofmap(mesh, 2, spec.N), mesh)
    if dofmap.n_free == 0:
        raise DiscretizationError("no free degrees of freedom after clamping", N=spec.N, level=spec.level)
    rule = gauss_legendre(spec.quadrature) if spec.quadrature else default_quadrature(basis, spec.coefficient)
    pencil = assemble_pencil(mesh, dofmap, basis, spec.coefficient, rule, workers=spec.workers)
    return mesh, basis, dofmap, pencil


def _solve_pencil(pencil: BlockPencil, opts: EigOptions):
    """
    Pairs of the balanced pencil with w scaled back, |lambda| >= ZERO_LAMBDA,
    and the linearization defect of each.
    """
    A, B, scale = pencil.balanced()
    eig = solve(A, B, opts)
    n = pencil.n_free
    vectors = eig.eigenvectors.copy()
    vectors[n:] *= scale
    eig = replace(eig, eigenvectors=vectors)

    nonzero = np.abs(eig.eigenvalues) >= ZERO_LAMBDA
    if not np.all(nonzero):
        logger.info(f"Discarded {np.count_nonzero(~nonzero)} eigenvalues with |lambda| < {ZERO_LAMBDA:.0e}")
    eig = eig.subset(np.flatnonzero(nonzero))
    defects = np.array(
        [
            linearization_defect(pencil.M, eig.eigenvectors[:n, j], eig.eigenvectors[n:, j], eig.eigenvalues[j])
            for j in range(len(eig))
        ]
    )
    return eig, defects


def solve_transmission(spec: ProblemSpec) -> TransmissionResult:
    """
    The spec.eig.count pairs nearest sigma that pass the w = lambda u check.
    Pairs failing it are dropped and the pencil is re-solved for more
    candidates, at most RESOLVE_ATTEMPTS times.
    """
    start = time.perf_counter()
    mesh, basis, dofmap, pencil = discretize(spec)
    assembly_time = time.perf_counter() - start

    wanted = spec.eig.count
    count = wanted
    start = time.perf_counter()
    for attempt in range(1, RESOLVE_ATTEMPTS + 1):
        subspace = spec.eig.subspace if spec.eig.subspace and spec.eig.subspace > count else None
        opts = replace(spec.eig, shift=spec.sigma, count=count, subspace=subspace)
        eig, defects = _solve_pencil(pencil, opts)
        passed = defects <= DEFECT_TOL
        if np.count_nonzero(passed) >= wanted or count >= pencil.dimension:
            break
        if attempt < RESOLVE_ATTEMPTS:
            logger.warning(
                f"Only {np.count_nonzero(passed)} of {wanted} pairs pass the linearization check; "
                f"re-solving with count {min(2 * count, pencil.dimension)}"
            )
            count = min(2 * count, pencil.dimension)
    solve_time = time.perf_counter() - start

    if not np.all(passed):
        logger.warning(
            f"Dropped {np.count_nonzero(~passed)} pairs with linearization defect above {DEFECT_TOL:.0e} "
            f"(max {np.max(defects[~passed]):.3e})"
        )
    eig, defects = eig.subset(np.flatnonzero(passed)), defects[passed]
    if len(eig) == 0:
        raise SolverError("no nonzero eigenvalues near the shift pass the linearization check", shift=opts.shift)
    nearest = np.argsort(np.abs(eig.eigenvalues - opts.shift), kind="stable")[:wanted]
    eig, defects = eig.subset(nearest), defects[nearest]
    if len(eig) < wanted:
        logger.warning(f"Returning {len(eig)} of {wanted} requested pairs after {attempt} solves")

    k = wavenumbers_from(eig.eigenvalues)
    order = wavenumber_order(k)
    eig, defects, k = eig.subset(order), defects[order], k[order]

    n = pencil.n_free
    dofs = {"per_field": n, "doubled": 2 * n, "unclamped": dofmap.total}
    logger.info(
        f"Transmission solve: N={spec.N}, level={spec.level}, dof={n} per field ({2 * n} total), "
        f"k1={k[0]:.12g}, assembly={assembly_time:.2f}s, solve={solve_time:.2f}s"
    )
    return TransmissionResult(
        spec=spec,
        wavenumbers=k,
        eigenvalues=eig.eigenvalues,
        u=eig.eigenvectors[:n],
        w=eig.eigenvectors[n:],
        residuals=eig.residuals,
        converged=eig.converged,
        defects=defects,
        dofs=dofs,
        timings={"assembly": assembly_time, "solve": solve_time, "solves": float(attempt), **eig.stats},
        method=eig.method,
        mesh=mesh,
        dofmap=dofmap,
        basis=basis,
        pencil=pencil,
    )


def _relative_gap(a: np.ndarray, b: np.ndarray, count: int) -> float:
    count = min(count, a.size, b.size)
    if count == 0:
        raise SolverError("no wavenumbers to compare")
    return float(np.max(np.abs(a[:count] - b[:count]) / np.abs(a[:count])))


def translate_invariance_check(
    spec: ProblemSpec, offset: Optional[Sequence[float]] = None, count: int = INVARIANCE_COUNT
) -> float:
    """Largest relative change of the first `count` wavenumbers under translation."""
    if not spec.coefficient.is_constant:
        logger.warning("Translating a variable coefficient problem; wavenumbers are not expected to agree")
    offset = tuple(offset) if offset is not None else (0.5,) * spec.domain.d
    moved = replace(spec, domain=spec.domain.translated(offset))
    gap = _relative_gap(solve_transmission(spec).wavenumbers, solve_transmission(moved).wavenumbers, count)
    logger.info(f"Translation by {offset}: max relative wavenumber change {gap:.3e}")
    return gap


def scaling_check(spec: ProblemSpec, factor: float = 2.0, count: int = INVARIANCE_COUNT) -> float:
    """Largest relative deviation from k -> k / factor when the domain is scaled by factor."""
    if factor <= 0:
        raise DiscretizationError("scale factor must be positive", factor=factor)
    scaled = replace(
        spec,
        domain=spec.domain.scaled(factor),
        k_guess=spec.k_guess / factor,
        shift=None if spec.shift is None else spec.shift / factor ** 2,
    )
    base = solve_transmission(spec).wavenumbers
    gap = _relative_gap(base / factor, solve_transmission(scaled).wavenumbers, count)
    logger.info(f"Scaling by {factor}: max relative deviation from k/s {gap:.3e}")
    return gap


@dataclass(frozen=True, eq=False)
class EigenfunctionSample:
    """u on a uniform grid per element: points[e] is (P, d), values[e] is (P,)."""

    dim: int
    grid: int
    index: int
    wavenumber: complex
    points: List[np.ndarray]
    values: List[np.ndarray]

    @property
    def n_elements(self) -> int:
        return len(self.points)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(v))) for v in self.values)

    def lines(self) -> List[str]:
        """Structured grid text: header, then one blank-line separated block per element."""
        out = [f"dim {self.dim}", f"elements {self.n_elements}", "grid " + " ".join([str(self.grid)] * self.dim)]
        for points, values in zip(self.points, self.values):
            out.append("")
            for x, v in zip(points, values):
                coords = " ".join(f"{c:.15g}" for c in x)
                out.append(f"{coords} {v.real:.15g} {v.imag:.15g}")
        return out


def eigenfunction_sample(result: TransmissionResult, index: int, grid: int = 21) -> EigenfunctionSample:
    """
    Sample u of pair `index` (0-based), normalized to ||u||_L2 = 1 with the
    largest-magnitude sample made real positive.
    """
    if not 0 <= index < len(result):
        raise DiscretizationError("eigenfunction index out of range", index=index, available=len(result))
    if grid < 2:
        raise DiscretizationError("grid needs at least 2 samples per direction", grid=grid)

    u = result.u[:, index]
    norm = _m_norm(result.pencil.M, u)
    if norm == 0.0:
        raise SolverError("eigenfunction has zero L2 norm", index=index)
    coeffs = result.dofmap.expand(u / norm)

    mesh = result.mesh
    points, values = [], []
    for e in range(mesh.n_elements):
        box = mesh.element_box(e)
        axes = [np.linspace(lo, hi, grid) for lo, hi in box]
        tables = [sb.values(x, 0) for sb, x in zip(element_bases(box, result.basis), axes)]
        local = result.dofmap.local_coefficients(coeffs, e)
        points.append(grid_points(axes))
        values.append(evaluate_grid(local, tables).ravel())

    flat = np.concatenate(values)
    peak = flat[np.argmax(np.abs(flat))]
    phase = np.conj(peak) / abs(peak)
    values = [v * phase for v in values]
    return EigenfunctionSample(
        dim=mesh.d,
        grid=grid,
        index=index,
        wavenumber=complex(result.wavenumbers[index]),
        points=points,
        values=values,
    )


def convergence_table(
    template: ProblemSpec,
    degrees: Optional[Sequence[int]] = None,
    levels: Optional[Sequence[int]] = None,
    count: Optional[int] = None,
    workers: int = 1,
) -> List[Dict[str, Any]]:
    """
    One row per (N, level): h, dof in both conventions, k_1..k_count and the
    change of each k_j against the previous row.
    """
    degrees = list(degrees) if degrees else [template.N]
    levels = list(levels) if levels else [template.level]
    count = count or template.eig.count
    specs = [replace(template, N=N, level=level) for N in degrees for level in levels]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_transmission, specs))
    else:
        results = [solve_transmission(s) for s in specs]

    rows = []
    previous = None
    for spec, result in zip(specs, results):
        k = result.wavenumbers[:count]
        row = {
            "N": spec.N,
            "level": spec.level,
            "h": result.mesh.h,
            "dof": result.dofs["per_field"],
            "dof_doubled": result.dofs["doubled"],
        }
        for j in range(count):
            has = j < k.size
            row[f"re_k{j + 1}"] = float(k[j].real) if has else float("nan")
            row[f"im_k{j + 1}"] = float(k[j].imag) if has else float("nan")
        if previous is not None and previous.size and k.size:
            row["diff_k1"] = float(abs(k[0] - previous[0]))
        else:
            row["diff_k1"] = float("nan")
        rows.append(row)
        previous = k
    return rows


def table_columns(count: int) -> List[str]:
    columns = ["N", "level", "h", "dof", "dof_doubled"]
    for j in range(1, count + 1):
        columns += [f"re_k{j}", f"im_k{j}"]
    return columns + ["diff_k1"]


SOLVE_COLUMNS = ["index", "re_k", "im_k", "re_lambda", "im_lambda", "residual"]


class TransmissionService:
    """
    Runs solve and sweep configurations and persists their artifacts.
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.logger = get_logger(f"{__name__}.{self.__class__.__name__}")

    def problem_from_config(self, config: RunConfig, N: Optional[int] = None, level: Optional[int] = None) -> ProblemSpec:
        disc = config.discretization
        N = N if N is not None else disc.degrees[0]
        opts = EigOptions(
            count=config.eigen.count,
            method=config.eigen.method,
            tol=config.eigen.tol,
            max_restarts=self.settings.ARPACK_MAX_RESTARTS,
            dense_threshold=self.settings.DENSE_THRESHOLD,
            seed=config.seed if config.seed is not None else self.settings.DEFAULT_SEED,
        )
        return ProblemSpec(
            domain=BoxDomain.from_boxes(config.domain.boxes),
            N=N,
            coefficient=config.coefficient,
            level=level if level is not None else disc.levels[0],
            eig=opts,
            k_guess=config.eigen.k_guess,
            shift=config.eigen.shift,
            quadrature=disc.quadrature,
            workers=self.settings.SEM_WORKERS,
        )

    def run_solve(self, config: RunConfig, repository: ArtifactRepository) -> TransmissionResult:
        spec = self.problem_from_config(config)
        result = solve_transmission(spec)

        rows = [
            {
                "index": j + 1,
                "re_k": float(k.real),
                "im_k": float(k.imag),
                "re_lambda": float(lam.real),
                "im_lambda": float(lam.imag),
                "residual": float(r),
            }
            for j, (k, lam, r) in enumerate(zip(result.wavenumbers, result.eigenvalues, result.residuals))
        ]
        repository.write_table("eigenvalues.csv", SOLVE_COLUMNS, rows)

        for index in config.eigenfunctions:
            if index > len(result):
                self.logger.warning(f"Eigenfunction {index} requested but only {len(result)} pairs were computed")
                continue
            sample = eigenfunction_sample(result, index - 1, config.grid)
            repository.write_lines(f"eigenfunction_{index}.dat", sample.lines())

        if config.dump_pencil:
            for name, matrix in [("A", result.pencil.A), ("B", result.pencil.B)] + result.pencil.blocks():
                repository.write_matrix(f"pencil_{name}.mtx", matrix, comment=f"{name} block, N={spec.N}")

        repository.write_report("report.txt", self._report(config, spec, result))
        return result

    def run_sweep(self, config: RunConfig, repository: ArtifactRepository) -> List[Dict[str, Any]]:
        template = self.problem_from_config(config)
        disc = config.discretization
        rows = convergence_table(
            template,
            degrees=disc.degrees,
            levels=disc.levels,
            count=config.eigen.count,
            workers=self.settings.SEM_WORKERS,
        )
        repository.write_table("sweep.csv", table_columns(config.eigen.count), rows)
        lines = ["# configuration", *emit_config(config).splitlines(), "", "# sweep"]
        lines += [
            f"N={row['N']} level={row['level']} h={row['h']:.6g} dof={row['dof']} ({row['dof_doubled']}) "
            f"k1={row['re_k1']:.12g}{row['im_k1']:+.12g}i"
            for row in rows
        ]
        repository.write_report("report.txt", lines)
        return rows

    def _report(self, config: RunConfig, spec: ProblemSpec, result: TransmissionResult) -> List[str]:
        lines = ["# configuration", *emit_config(config).splitlines(), ""]
        lines += [
            "# discretization",
            f"elements = {result.mesh.n_elements}",
            f"h = {result.mesh.h:.15g}",
            f"dof per field = {result.dofs['per_field']}",
            f"dof doubled = {result.dofs['doubled']}",
            f"pencil dimension = {result.pencil.dimension}",
            f"shift = {spec.sigma}",
            f"method = {result.method}",
            "",
            "# timings",
        ]
        lines += [f"{key} = {value:.3f}" for key, value in result.timings.items()]
        lines += ["", "# wavenumbers"]
        for j, (k, r, defect) in enumerate(zip(result.wavenumbers, result.residuals, result.defects)):
            lines.append(f"k{j + 1} = {k.real:.15g} {k.imag:+.15g}i  residual={r:.2e}  defect={defect:.2e}")
        return lines
