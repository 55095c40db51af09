from pydantic import BaseModel, ConfigDict, Field

from hmix.schemas.solver_schema import StepRecord
from .grid_model import GridFunction


class HomotopyState(BaseModel):
    """Current point on the continuity path; only accepted states are stored."""

    model_config = ConfigDict(arbitrary_types_allowed=True, validate_assignment=True)

    t: float = Field(ge=0.0, le=1.0)
    u: GridFunction
    residual_inf: float = 0.0
    newton_iters: int = 0
    step_history: list[StepRecord] = Field(default_factory=list)
