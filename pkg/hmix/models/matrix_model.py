import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from hmix.core.errors import ArgumentError
from .spectrum_model import Spectrum

HERMITIAN_TOL = 1e-12


def hermitian_defect(a: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    return float(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))))) / scale


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Average with the conjugate transpose; the diagonal comes out exactly real."""
    h = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    idx = np.arange(a.shape[-1])
    h[..., idx, idx] = h[..., idx, idx].real
    return h


class HermitianMatrix(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray

    @field_validator("entries", mode="before")
    @classmethod
    def _hermitian(cls, v):
        a = np.array(v, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if hermitian_defect(a) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        return symmetrize(a)

    @classmethod
    def from_array(cls, a) -> "HermitianMatrix":
        if isinstance(a, HermitianMatrix):
            return a
        try:
            return cls(entries=a)
        except ValidationError as e:
            raise ArgumentError(f"invalid Hermitian matrix: {e.errors()[0]['msg']}") from e

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


class EigenPair(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spectrum: Spectrum
    basis: np.ndarray  # columns are eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.spectrum.values) @ np.conj(self.basis.T)
