from datetime import datetime
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field


class OracleReport(BaseModel):
    name: str = ""
    max_abs_err: float = 0.0
    max_rel_err: float = 0.0
    tolerance: float = 0.0
    cases: int = 0
    failures: list[Any] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, expected: float, actual: float, case: Any, rel_floor: float = 1.0) -> None:
        """Accumulate one comparison; a case fails when its relative error exceeds tolerance."""
        abs_err = abs(actual - expected)
        rel_err = abs_err / max(abs(expected), rel_floor)
        self.cases += 1
        self.max_abs_err = max(self.max_abs_err, abs_err)
        self.max_rel_err = max(self.max_rel_err, rel_err)
        if not rel_err <= self.tolerance:
            self.failures.append(case)


class SuiteReport(BaseModel):
    suite: str
    seed: int
    reports: list[OracleReport] = Field(default_factory=list)
    observations: dict[str, Any] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


class ConeBoundsReport(BaseModel):
    """Quotient, trace and Euler bounds at one admissible point solving G = beta."""

    quotients: list[float]
    quotients_positive: bool
    ratio_lower_ok: bool
    trace: float
    trace_lower: float
    trace_ok: bool
    trace_upper_observed: Optional[float] = None
    euler_lhs: float
    euler_rhs: float
    euler_ok: bool
    finite: bool = True

    @property
    def ok(self) -> bool:
        return self.finite and self.quotients_positive and self.ratio_lower_ok and self.trace_ok and self.euler_ok


class DichotomyBranch(str, Enum):
    FIRST_BRANCH = "FirstBranch"
    SECOND_BRANCH = "SecondBranch"
    NOT_APPLICABLE = "NotApplicable"
    # neither inequality held: a calibration miss for the chosen (theta, N)
    NEITHER = "Neither"


class Artifact(BaseModel):
    path: str
    sha256: str
    bytes: int


class RunManifest(BaseModel):
    command: str
    config_path: Optional[str] = None
    output_dir: str
    seed: int
    started_at: datetime
    finished_at: Optional[datetime] = None
    exit_code: Optional[int] = None
    wall_time: Optional[float] = None
    artifacts: list[Artifact] = Field(default_factory=list)
