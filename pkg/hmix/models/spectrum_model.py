import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Spectrum(BaseModel):
    """Ascending eigenvalue vector with cached sigma_0..sigma_n.

    values[0] is the smallest eigenvalue; the largest is values[-1].
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    sigmas: np.ndarray

    @field_validator("values", "sigmas", mode="before")
    @classmethod
    def _as_float_array(cls, v):
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _check(self):
        n = self.values.shape[-1]
        if self.values.ndim != 1 or n < 2:
            raise ValueError("spectrum needs a vector of n >= 2 values")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("spectrum values must be sorted ascending")
        if self.sigmas.shape != (n + 1,) or self.sigmas[0] != 1.0:
            raise ValueError("sigmas must hold sigma_0..sigma_n with sigma_0 = 1")
        return self

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def sigma(self, k: int) -> float:
        return float(self.sigmas[k])


class ConeReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    max_k: int
    margins: np.ndarray  # sigma_1..sigma_n

    def contains(self, k: int) -> bool:
        """True when the vector lies in Gamma_k (Gamma_0 is everything)."""
        return k <= self.max_k
