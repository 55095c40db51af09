import json
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from hmix.core.errors import ConfigError, HmixError
from hmix.core.logging import setup_logging
from .common import emit, fail


def manufacture(
    ustar: str = typer.Option(..., "--ustar", help="u* descriptor as JSON, or @path to a JSON file"),
    out: Path = typer.Option(..., "--out", "-o", help="Config file to write"),
    n: int = typer.Option(2, "--n", help="Complex dimension"),
    k: int = typer.Option(2, "--k", help="Operator order"),
    alpha: list[float] = typer.Option([1.0], "--alpha", help="alpha_0..alpha_{k-2} (repeat the option)"),
    shape: int = typer.Option(9, "--shape", help="Points per axis"),
    lo: float = typer.Option(-1.0, "--lo"),
    hi: float = typer.Option(1.0, "--hi"),
    chi0_scale: float = typer.Option(0.0, "--chi0-scale", help="chi_0 = scale * I"),
    deflate: float = typer.Option(0.0, "--deflate", help="Subsolution deflation constant c"),
    name: Optional[str] = typer.Option(None, "--name"),
):
    """Write a manufactured-solution problem config after checking that it builds."""
    setup_logging()

    from hmix.schemas import ProblemConfig
    from hmix.services import ProblemService

    try:
        text = Path(ustar[1:]).read_text() if ustar.startswith("@") else ustar
        raw = {
            "name": name or out.stem,
            "n": n,
            "k": k,
            "box": {"lo": lo, "hi": hi},
            "shape": shape,
            "chi0": {"kind": "scaled_identity", "scale": chi0_scale},
            "alpha": [{"kind": "constant", "value": a} for a in alpha],
            "ustar": json.loads(text),
        }
        if deflate > 0:
            raw["deflation"] = {"c": deflate}
        try:
            config = ProblemConfig.model_validate(raw)
        except ValidationError as e:
            errors = json.loads(e.json(include_url=False))
            raise ConfigError("manufactured config failed validation", context={"errors": errors}) from e
        ProblemService().load(config)
    except (OSError, json.JSONDecodeError) as e:
        raise fail(ConfigError(f"cannot read u* descriptor: {e}"))
    except HmixError as exc:
        raise fail(exc)

    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(config.model_dump_json(indent=2, exclude_none=True))
    emit({"config": str(out), "name": config.name})
