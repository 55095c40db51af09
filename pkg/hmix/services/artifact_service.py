import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, ValidationError

from hmix.core.errors import HmixError
from hmix.models import GridFunction
from hmix.numerics import geometry
from hmix.schemas import Artifact, RunManifest
from hmix.utils import utc_now, validate_time_range

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ArtifactService:
    """Writes run outputs under one directory and keeps the manifest listing them."""

    def __init__(self, output_dir: Union[str, Path], command: str, seed: int = 0, config_path: Optional[str] = None):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(
            command=command,
            config_path=config_path,
            output_dir=str(self.output_dir),
            seed=seed,
            started_at=utc_now(),
        )

    def _register(self, path: Path) -> Artifact:
        artifact = Artifact(
            path=str(path.relative_to(self.output_dir)),
            sha256=sha256_file(path),
            bytes=path.stat().st_size,
        )
        self.manifest.artifacts.append(artifact)
        return artifact

    def save_json(self, name: str, payload: Union[BaseModel, dict[str, Any]]) -> Artifact:
        path = self.output_dir / name
        try:
            if isinstance(payload, BaseModel):
                text = payload.model_dump_json(indent=2)
            else:
                text = json.dumps(payload, indent=2, default=str)
            path.write_text(text)
        except OSError as e:
            raise HmixError(f"could not write {path}: {e}") from e
        return self._register(path)

    def save_field(self, name: str, u: GridFunction) -> list[Artifact]:
        """Binary field plus its JSON sidecar."""
        try:
            data, meta = geometry.dump_field(u, self.output_dir / name)
        except OSError as e:
            raise HmixError(f"could not write field {name}: {e}") from e
        return [self._register(data), self._register(meta)]

    def save_csv_slice(self, name: str, u: GridFunction) -> Artifact:
        return self._register(geometry.export_csv_slice(u, self.output_dir / name))

    def finish(self, exit_code: int) -> RunManifest:
        if not self.verify():
            raise HmixError("an artifact changed after it was written", context={"output_dir": str(self.output_dir)})
        self.manifest.finished_at = utc_now()
        self.manifest.exit_code = exit_code
        validate_time_range(self.manifest.started_at, self.manifest.finished_at)
        (self.output_dir / MANIFEST_NAME).write_text(self.manifest.model_dump_json(indent=2))
        logger.info("manifest written dir=%s artifacts=%d", self.output_dir, len(self.manifest.artifacts))
        return self.manifest

    @classmethod
    def load(cls, output_dir: Union[str, Path]) -> "ArtifactService":
        """Reopen a finished run from its manifest."""
        output_dir = Path(output_dir)
        try:
            manifest = RunManifest.model_validate_json((output_dir / MANIFEST_NAME).read_text())
        except (OSError, ValidationError) as e:
            raise HmixError(f"could not read manifest in {output_dir}: {e}") from e
        service = cls.__new__(cls)
        service.output_dir = output_dir
        service.manifest = manifest
        return service

    def verify(self) -> bool:
        """Every listed artifact exists and still matches its hash."""
        for artifact in self.manifest.artifacts:
            path = self.output_dir / artifact.path
            if not path.exists() or sha256_file(path) != artifact.sha256:
                return False
        return True
