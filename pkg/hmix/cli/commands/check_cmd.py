from pathlib import Path

import typer

from hmix.core.config import get_settings
from hmix.core.errors import ConstructionError, HmixError
from hmix.core.logging import setup_logging
from .common import emit, fail, load_config, solver_config

SUPERSOLUTION_TOL = 1e-8


def check(
    config: Path = typer.Option(..., "--config", "-c", help="Problem config JSON"),
    grid_scale: float = typer.Option(1.0, "--grid-scale", help="Refinement multiplier for the config grid"),
):
    """Validate a problem: admissibility, subsolution inequality, supersolution residual, cone bounds on u_sub."""
    settings = get_settings()
    setup_logging()

    from hmix.services import DiagnosticsService, ProblemService, sandwich_tolerance

    try:
        problem_config = load_config(config)
        problems = ProblemService(solver_config(problem_config, settings))
        spec, _ = problems.load(problem_config, grid_scale)
        margins = problems.subsolution_margins(spec)
        diagnostics = DiagnosticsService(spec)
        v = problems.supersolution(spec)
        margins["supersolution_residual"] = problems.supersolution_residual(v, spec)
        _, margins["sandwich_margin"] = problems.c0_sandwich_check(spec.usub, spec, v)
        cone_bounds = diagnostics.cone_bounds_audit(spec.usub)
        margins["cone_bounds_ok"] = cone_bounds.ok

        allowance = sandwich_tolerance(spec.grid)
        if not margins["cone_margin"] > 0:
            raise ConstructionError("subsolution is not admissible on the grid", context={"margins": margins})
        if margins["subsolution_margin"] < -allowance:
            raise ConstructionError("discrete subsolution inequality violated", context={"margins": margins})
        if margins["supersolution_residual"] > SUPERSOLUTION_TOL:
            raise ConstructionError("supersolution residual above tolerance", context={"margins": margins})
        if not cone_bounds.ok:
            raise ConstructionError(f"cone bounds failed: {cone_bounds.detail}", context={"margins": margins})
    except HmixError as exc:
        raise fail(exc)

    emit({"problem": spec.name, "ok": True, "margins": margins})
