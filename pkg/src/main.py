"""
Main entry point for the spectral element transmission solver.

Usage:
    python -m src.main <config.cfg> [output_dir]

The command to run is read from the configuration. Exit codes:
0 ok, 1 config, 2 mesh, 3 assembly, 4 solver.
"""

import sys
from pathlib import Path
from typing import List, Optional

from .core.config import get_settings
from .core.container import get_inspection_service, get_interpolation_service, get_transmission_service
from .core.exceptions import SpectralError
from .core.logging.logger_factory import get_logger
from .repositories.artifact_repository import ArtifactRepository
from .schemas.run_config import RunConfig, load_config

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_SETTINGS = 1


def run(config: RunConfig, output: Optional[str] = None) -> int:
    """Run one configuration and write its artifacts; returns the exit code."""
    root = Path(output or config.output or get_settings().OUTPUT_DIR)
    repository = ArtifactRepository(root)
    logger.info(f"Running '{config.command}' into {root}")

    if config.command == "solve":
        result = get_transmission_service().run_solve(config, repository)
        print(f"dof {result.dofs['per_field']} per field ({result.dofs['doubled']} total)")
        for j, k in enumerate(result.wavenumbers, start=1):
            print(f"k{j} = {k.real:.15g} {k.imag:+.15g}i")

    elif config.command == "sweep":
        rows = get_transmission_service().run_sweep(config, repository)
        for row in rows:
            print(f"N={row['N']} level={row['level']} dof={row['dof']} k1={row['re_k1']:.12g}")

    elif config.command == "interp-study":
        rows = get_interpolation_service().run_study(config, repository)
        for row in rows:
            print(f"N={row['N']} level={row['level']} H2 error={row['err_h2']:.3e} slope={row['slope']:.3f}")

    elif config.command == "basis-dump":
        rows = get_inspection_service().run_basis_dump(config, repository)
        print(f"basis samples {len(rows)}")

    elif config.command == "mesh-info":
        report = get_inspection_service().run_mesh_info(config, repository)
        print(f"elements {report['elements']}")
        print(f"dof {report['dof_free']} per field ({report['dof_doubled']} total)")

    print(f"artifacts in {root}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help"):
        print("Usage:")
        print("  python -m src.main <config.cfg> [output_dir]")
        return EXIT_OK if argv else 1

    try:
        get_settings()
    except ValueError as e:
        logger.error(f"config error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SETTINGS

    try:
        config = load_config(argv[0])
        return run(config, argv[1] if len(argv) > 1 else None)
    except SpectralError as e:
        logger.error(f"{e.category} error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
