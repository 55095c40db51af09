from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, NonNegativeFloat, model_validator

from .descriptor_schema import BumpDescriptor, ScalarDescriptor
from .solver_schema import SolverConfigUpdate


class ScaledIdentityChi0(BaseModel):
    kind: Literal["scaled_identity"] = "scaled_identity"
    scale: float = 0.0

    def matrix(self, n: int) -> np.ndarray:
        return self.scale * np.eye(n, dtype=complex)


class ConstantMatrixChi0(BaseModel):
    kind: Literal["constant_matrix"] = "constant_matrix"
    real: list[list[float]]
    imag: Optional[list[list[float]]] = None

    def matrix(self, n: int) -> np.ndarray:
        m = np.asarray(self.real, dtype=complex)
        if self.imag is not None:
            m = m + 1j * np.asarray(self.imag, dtype=float)
        if m.shape != (n, n):
            raise ValueError(f"chi0 matrix must be {n}x{n}")
        return m


Chi0Config = Annotated[Union[ScaledIdentityChi0, ConstantMatrixChi0], Field(discriminator="kind")]


class BoxConfig(BaseModel):
    lo: Union[float, list[float]] = -1.0
    hi: Union[float, list[float]] = 1.0

    def corners(self, dim: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
        lo = (self.lo,) * dim if isinstance(self.lo, (int, float)) else tuple(self.lo)
        hi = (self.hi,) * dim if isinstance(self.hi, (int, float)) else tuple(self.hi)
        return tuple(map(float, lo)), tuple(map(float, hi))


class DeflationConfig(BaseModel):
    c: NonNegativeFloat = 0.0
    bump: BumpDescriptor = Field(default_factory=BumpDescriptor)


class ProblemConfig(BaseModel):
    """Problem config JSON.

    With `ustar` the right-hand side is manufactured, so `alpha` lists only
    alpha_0..alpha_{k-2}; without it `alpha` lists all k coefficients.
    """

    name: str = "problem"
    n: int = Field(ge=1)
    k: int = Field(ge=2)
    box: BoxConfig = Field(default_factory=BoxConfig)
    shape: Union[int, list[int]] = 9
    chi0: Chi0Config = Field(default_factory=ScaledIdentityChi0)
    alpha: list[ScalarDescriptor]
    ustar: Optional[ScalarDescriptor] = None
    phi: Optional[ScalarDescriptor] = None
    usub: Optional[ScalarDescriptor] = None
    deflation: Optional[DeflationConfig] = None
    beta_shift: float = 0.0
    solver: Optional[SolverConfigUpdate] = None

    @model_validator(mode="after")
    def _check(self):
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        expected = self.k - 1 if self.ustar is not None else self.k
        if len(self.alpha) != expected:
            mode = "set" if self.ustar else "null"
            raise ValueError(f"alpha needs {expected} descriptors (k={self.k}, ustar={mode})")
        if self.ustar is None and self.phi is None:
            raise ValueError("phi is required when ustar is null")
        if self.deflation is not None and self.deflation.c > 0 and self.ustar is None:
            raise ValueError("deflation needs a manufactured solution ustar")
        return self

    def grid_shape(self) -> tuple[int, ...]:
        dim = 2 * self.n
        if isinstance(self.shape, int):
            return (self.shape,) * dim
        return tuple(self.shape)
