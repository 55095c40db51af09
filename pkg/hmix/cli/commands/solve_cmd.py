import logging
from pathlib import Path
from typing import Optional

import typer

from hmix.core.config import get_settings
from hmix.core.errors import HmixError, HomotopyFailure
from hmix.core.logging import setup_logging
from .common import emit, fail, limit_threads, load_config, solver_config

logger = logging.getLogger(__name__)


def solve(
    config: Path = typer.Option(..., "--config", "-c", help="Problem config JSON"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory (default OUTPUT_DIR/<config stem>)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Recorded in the manifest"),
    grid_scale: float = typer.Option(1.0, "--grid-scale", help="Refinement multiplier for the config grid"),
    max_threads: Optional[int] = typer.Option(None, "--max-threads", help="BLAS/OpenMP thread cap"),
    csv_slice: bool = typer.Option(False, "--csv-slice", help="Also export the (x1, y1) plane as CSV"),
):
    """Solve a problem by the continuity method and write field, report and manifest."""
    settings = get_settings()
    limit_threads(max_threads or settings.MAX_THREADS)
    setup_logging()

    import numpy as np

    from hmix.schemas import AuditResult, RunReport
    from hmix.services import (
        ArtifactService,
        ContinuationSolver,
        DiagnosticsService,
        ProblemService,
        sandwich_tolerance,
    )

    out = out or Path(settings.OUTPUT_DIR) / config.stem
    seed = settings.SEED if seed is None else seed
    artifacts = ArtifactService(out, "solve", seed=seed, config_path=str(config))

    try:
        problem_config = load_config(config)
        cfg = solver_config(problem_config, settings)
        problems = ProblemService(cfg)
        spec, manufactured = problems.load(problem_config, grid_scale)
        u, report = ContinuationSolver(cfg).continuity_solve(spec)
    except HomotopyFailure as exc:
        failed = RunReport(problem=problem_config.name, config=cfg.model_dump(), error=exc.to_dict())
        artifacts.save_json("report.json", failed)
        artifacts.finish(exc.exit_code)
        raise fail(exc)
    except HmixError as exc:
        artifacts.save_json("error.json", exc.to_dict())
        artifacts.finish(exc.exit_code)
        raise fail(exc)

    v = problems.supersolution(spec)
    ok, worst = problems.c0_sandwich_check(u, spec, v)
    residual = problems.supersolution_residual(v, spec)
    report.audits.extend(
        [
            AuditResult(name="c0_sandwich", ok=ok, worst=worst, detail=f"tol={sandwich_tolerance(spec.grid):.3e}"),
            AuditResult(name="supersolution_residual", ok=residual <= 1e-8, worst=residual),
        ]
    )
    report.diagnostics.update(DiagnosticsService(spec).summary(u))
    if manufactured is not None:
        report.diagnostics["max_error_vs_ustar"] = float(np.max(np.abs(u.values - manufactured.ustar.values)))

    artifacts.save_field("u.bin", u)
    if csv_slice:
        artifacts.save_csv_slice("u_slice.csv", u)
    artifacts.save_json("report.json", report)
    artifacts.manifest.wall_time = report.wall_time
    artifacts.finish(0)
    emit(
        {
            "problem": report.problem,
            "converged": report.converged,
            "final_residual": report.final_residual,
            "total_newton_iters": report.total_newton_iters,
            "audits_ok": report.audit_ok(),
            "out": str(out),
        }
    )
