from .descriptor_schema import ScalarDescriptor, BumpDescriptor
from .problem_schema import ProblemConfig, DeflationConfig, BoxConfig
from .solver_schema import SolverConfig, SolverConfigUpdate, StepRecord, AuditResult, RunReport
from .report_schema import (
    OracleReport,
    SuiteReport,
    ConeBoundsReport,
    DichotomyBranch,
    Artifact,
    RunManifest,
)

__all__ = [
    "ScalarDescriptor",
    "BumpDescriptor",
    "ProblemConfig",
    "DeflationConfig",
    "BoxConfig",
    "SolverConfig",
    "SolverConfigUpdate",
    "StepRecord",
    "AuditResult",
    "RunReport",
    "OracleReport",
    "SuiteReport",
    "ConeBoundsReport",
    "DichotomyBranch",
    "Artifact",
    "RunManifest",
]
