from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .grid_model import GridFunction, GridSpec, HermitianField


class ProblemSpec(BaseModel):
    """Dirichlet problem data sampled on a grid.

    `alpha` holds alpha_0..alpha_{k-1} sampled at interior points, shape
    (k, *interior_shape). Admissibility and the subsolution inequality need the
    operator, so ProblemService verifies them when it builds a spec.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = "problem"
    grid: GridSpec
    k: int
    chi0: HermitianField
    alpha: np.ndarray
    phi: GridFunction
    usub: GridFunction

    @field_validator("alpha", mode="before")
    @classmethod
    def _as_float_array(cls, v):
        return np.array(v, dtype=float)

    @model_validator(mode="after")
    def _check(self):
        grid = self.grid
        if not 2 <= self.k <= grid.n:
            raise ValueError(f"need 2 <= k <= n, got k={self.k}, n={grid.n}")
        if self.alpha.shape != (self.k,) + grid.interior_shape:
            raise ValueError(f"alpha shape {self.alpha.shape} does not match k and grid")
        for name, item in (("chi0", self.chi0), ("phi", self.phi), ("usub", self.usub)):
            if item.grid != grid:
                raise ValueError(f"{name} lives on a different grid")
        mask = grid.boundary_mask()
        if not np.array_equal(self.usub.values[mask], self.phi.values[mask]):
            raise ValueError("subsolution must equal the boundary data on the boundary layer")
        return self

    @property
    def n(self) -> int:
        return self.grid.n


class ManufacturedProblem(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: ProblemSpec
    ustar: GridFunction
    beta_field: np.ndarray  # interior samples of G(chi_{u*})
    chi_ustar: Optional[np.ndarray] = None  # analytic chi_{u*} at interior points
