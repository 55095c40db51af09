from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .matrix_model import HermitianMatrix


class Coefficients(BaseModel):
    """beta_0..beta_{k-2} and the right-hand side beta of the local form.

    Scalars or fields: `beta_l` has shape (k-1, *batch) and `beta` has shape
    batch, so one instance can carry sampled coefficient fields.
    beta_l >= 0 is enough for ellipticity and concavity; normalize_coefficients
    enforces the strict beta_l > 0 that problem construction requires.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    k: int
    beta_l: np.ndarray
    beta: np.ndarray

    @field_validator("beta_l", "beta", mode="before")
    @classmethod
    def _as_float_array(cls, v):
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _check(self):
        if not 2 <= self.k <= self.n:
            raise ValueError(f"need 2 <= k <= n, got k={self.k}, n={self.n}")
        if self.beta_l.ndim == 0 or self.beta_l.shape[0] != self.k - 1:
            raise ValueError(f"expected {self.k - 1} lower-order coefficients")
        if np.any(self.beta_l < 0) or not np.all(np.isfinite(self.beta_l)):
            raise ValueError("lower-order coefficients must be finite and >= 0")
        if not np.all(np.isfinite(self.beta)):
            raise ValueError("right-hand side must be finite")
        return self

    def with_beta(self, beta) -> "Coefficients":
        return Coefficients(n=self.n, k=self.k, beta_l=self.beta_l, beta=beta)


class OperatorEval(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    grad_lambda: np.ndarray
    grad_matrix: HermitianMatrix
    quotients: np.ndarray  # sigma_l / sigma_{k-1}, l = 0..k


class OperatorFieldEval(BaseModel):
    """Batched evaluation over many points: arrays carry leading batch axes."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: np.ndarray
    grad_lambda: np.ndarray
    grad_matrix: np.ndarray
    eigenvalues: np.ndarray
    quotients: Optional[np.ndarray] = None
