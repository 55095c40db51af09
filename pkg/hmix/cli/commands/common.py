"""Helpers shared by the command modules: config loading, error output, thread limits."""

import json
import os
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from hmix.core.config import Settings
from hmix.core.errors import ConfigError, HmixError

THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def limit_threads(max_threads: Optional[int]) -> None:
    """Must run before numpy is imported to take effect."""
    if max_threads:
        for name in THREAD_ENV_VARS:
            os.environ[name] = str(max_threads)


def load_config(path: Path):
    from hmix.schemas import ProblemConfig

    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        return ProblemConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(
            "config failed schema validation",
            context={"errors": json.loads(e.json(include_url=False))},
        ) from e


def solver_config(problem_config, settings: Settings):
    from hmix.schemas import SolverConfig

    try:
        base = SolverConfig(
            cone_margin=settings.CONE_MARGIN,
            direct_max_unknowns=settings.DIRECT_SOLVE_MAX_UNKNOWNS,
        )
        if problem_config.solver is not None:
            return problem_config.solver.apply(base)
        return base
    except ValidationError as e:
        raise ConfigError(
            "solver section failed validation",
            context={"errors": json.loads(e.json(include_url=False))},
        ) from e


def emit(payload: dict) -> None:
    typer.echo(json.dumps(payload, default=str))


def fail(exc: HmixError) -> typer.Exit:
    emit(exc.to_dict())
    return typer.Exit(code=exc.exit_code)
