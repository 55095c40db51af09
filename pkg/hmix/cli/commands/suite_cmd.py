from pathlib import Path
from typing import Optional

import typer

from hmix.core.config import get_settings
from hmix.core.errors import HmixError
from hmix.core.logging import setup_logging
from .common import emit, fail, limit_threads


def suite(
    name: str = typer.Argument(..., help="symfun | spectral | operator | convergence"),
    seed: Optional[int] = typer.Option(None, "--seed", help="RNG seed for sampled suites"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory for the suite report"),
    grids: Optional[list[int]] = typer.Option(None, "--grid", help="Points per axis for the convergence suite"),
    samples: int = typer.Option(1000, "--samples", help="Samples per case for sampled suites"),
    max_threads: Optional[int] = typer.Option(None, "--max-threads", help="BLAS/OpenMP thread cap"),
):
    """Run a named property suite and write its report."""
    settings = get_settings()
    limit_threads(max_threads or settings.MAX_THREADS)
    setup_logging()

    from hmix.services import ArtifactService, SuiteService
    from hmix.services.suite_service import DEFAULT_GRIDS

    seed = settings.SEED if seed is None else seed
    try:
        report = SuiteService(seed=seed, grids=grids or DEFAULT_GRIDS, samples=samples).run(name)
    except HmixError as exc:
        raise fail(exc)

    artifacts = ArtifactService(out or Path(settings.OUTPUT_DIR) / f"suite-{name}", f"suite {name}", seed=seed)
    artifacts.save_json(f"suite-{name}.json", report)
    code = 0 if report.ok else 1
    artifacts.finish(code)
    emit(
        {
            "suite": name,
            "ok": report.ok,
            "reports": {
                r.name: {"cases": r.cases, "failures": len(r.failures), "max_rel_err": r.max_rel_err}
                for r in report.reports
            },
            "observations": report.observations,
        }
    )
    if code:
        raise typer.Exit(code=code)
