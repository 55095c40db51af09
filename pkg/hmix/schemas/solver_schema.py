from typing import Any, Optional

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, model_validator


class SolverConfig(BaseModel):
    newton_tol: PositiveFloat = 1e-10
    max_newton: PositiveInt = 30
    damping: float = Field(default=0.5, gt=0.0, lt=1.0)
    min_step: PositiveFloat = 1e-6
    t_step0: float = Field(default=0.25, gt=0.0, le=1.0)
    t_min_step: PositiveFloat = 1e-4
    linear_tol: PositiveFloat = 1e-12
    cone_margin: PositiveFloat = 1e-10
    direct_max_unknowns: PositiveInt = 20000

    @model_validator(mode="after")
    def _ordered(self):
        if not self.linear_tol < self.newton_tol:
            raise ValueError("linear_tol must be smaller than newton_tol")
        if self.t_min_step > self.t_step0:
            raise ValueError("t_min_step must not exceed t_step0")
        return self


class SolverConfigUpdate(BaseModel):
    """Per-problem overrides, merged over the defaults."""

    newton_tol: Optional[PositiveFloat] = None
    max_newton: Optional[PositiveInt] = None
    damping: Optional[float] = None
    min_step: Optional[PositiveFloat] = None
    t_step0: Optional[float] = None
    t_min_step: Optional[PositiveFloat] = None
    linear_tol: Optional[PositiveFloat] = None
    cone_margin: Optional[PositiveFloat] = None
    direct_max_unknowns: Optional[PositiveInt] = None

    def apply(self, base: SolverConfig) -> SolverConfig:
        update_data = self.model_dump(exclude_none=True)
        return SolverConfig(**{**base.model_dump(), **update_data})


class StepRecord(BaseModel):
    t: float
    iters: int
    residual: float
    accepted: bool = True
    residuals: list[float] = Field(default_factory=list)
    note: Optional[str] = None


class AuditResult(BaseModel):
    name: str
    ok: bool
    worst: float = 0.0
    detail: Optional[str] = None


class RunReport(BaseModel):
    problem: str
    config: dict[str, Any]
    steps: list[StepRecord] = Field(default_factory=list)
    final_t: float = 0.0
    final_residual: float = float("inf")
    total_newton_iters: int = 0
    # not serialised; solve records it in the manifest
    wall_time: float = Field(default=0.0, exclude=True)
    converged: bool = False
    audits: list[AuditResult] = Field(default_factory=list)
    diagnostics: dict[str, float] = Field(default_factory=dict)
    error: Optional[dict[str, Any]] = None

    def audit_ok(self) -> bool:
        return all(a.ok for a in self.audits)
