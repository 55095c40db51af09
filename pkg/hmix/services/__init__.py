from .problem_service import ProblemService, sandwich_tolerance, spec_coefficients
from .solver_service import ContinuationSolver
from .diagnostics_service import DiagnosticsService
from .suite_service import SuiteService
from .artifact_service import ArtifactService

__all__ = [
    "ProblemService",
    "ContinuationSolver",
    "DiagnosticsService",
    "SuiteService",
    "ArtifactService",
    "sandwich_tolerance",
    "spec_coefficients",
]
