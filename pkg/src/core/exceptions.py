"""
Error hierarchy for the solver.

Every error raised on purpose by the package is a SpectralError carrying a
category and the process exit code the command-line front end returns for it.
"""


class SpectralError(Exception):
    """Base class for all solver errors."""

    category = "internal"
    exit_code = 1

    def __init__(self, message: str, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class ConfigError(SpectralError):
    """Run configuration could not be parsed or validated."""

    category = "config"
    exit_code = 1


class DiscretizationError(SpectralError, ValueError):
    """Invalid polynomial order, degree, index or other kernel precondition."""

    category = "config"
    exit_code = 1


class MeshError(SpectralError):
    """Domain is degenerate, overlapping, non-conforming or disconnected."""

    category = "mesh"
    exit_code = 2


class AssemblyError(SpectralError):
    """Matrix assembly failed."""

    category = "assembly"
    exit_code = 3


class CoefficientError(AssemblyError):
    """Refraction index violates |n - 1| > 0 or changes sign."""


class InterpolationError(SpectralError):
    """Shared degrees of freedom received inconsistent values."""

    category = "assembly"
    exit_code = 3


class SolverError(SpectralError):
    """Eigensolver failure: singular shift, QZ breakdown, no convergence."""

    category = "solver"
    exit_code = 4
