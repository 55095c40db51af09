from typing import Any, Optional

CONE_EXIT_MSG = "eigenvalues left the admissible cone"
COEFFICIENT_POSITIVITY_MSG = "coefficient positivity violated"
GRID_MISMATCH_MSG = "grid mismatch"


class HmixError(Exception):
    """Base error. Mirrors HTTPException: a detail message plus a process exit code."""

    exit_code: int = 1

    def __init__(
        self,
        detail: str,
        exit_code: Optional[int] = None,
        context: Optional[dict[str, Any]] = None,
    ):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code
        self.context = context or {}

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code,
            "context": self.context,
        }


class ArgumentError(HmixError, ValueError):
    pass


class DomainError(HmixError):
    """Raised on cone exit; `points` holds the violating multi-indices."""

    def __init__(self, detail: str = CONE_EXIT_MSG, points=None, **kwargs):
        super().__init__(detail, **kwargs)
        self.points = [] if points is None else [tuple(int(i) for i in p) for p in points]
        self.context.setdefault("points", self.points[:20])
        self.context.setdefault("violations", len(self.points))


class PreconditionError(HmixError):
    pass


class ConstructionError(HmixError):
    def __init__(self, detail: str, violations=None, **kwargs):
        super().__init__(detail, **kwargs)
        self.violations = list(violations or [])
        self.context.setdefault("violations", self.violations[:20])


class ConfigError(HmixError):
    pass


class NewtonStall(HmixError):
    pass


class LinearFailure(HmixError):
    pass


class HomotopyFailure(HmixError):
    exit_code = 2

    def __init__(self, detail: str, trace=None, **kwargs):
        super().__init__(detail, **kwargs)
        self.trace = list(trace or [])
        self.context.setdefault("trace", self.trace)
