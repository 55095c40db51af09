import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .matrix_model import HERMITIAN_TOL, hermitian_defect, symmetrize

MIN_POINTS_PER_AXIS = 5


class GridSpec(BaseModel):
    """Uniform grid on a box in C^n = R^{2n}; axes ordered x^1..x^n, y^1..y^n."""

    model_config = ConfigDict(frozen=True)

    n: int
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    shape: tuple[int, ...]

    @model_validator(mode="after")
    def _check(self):
        dim = 2 * self.n
        if self.n < 1:
            raise ValueError("complex dimension must be >= 1")
        if not (len(self.lo) == len(self.hi) == len(self.shape) == dim):
            raise ValueError(f"lo, hi and shape need {dim} entries")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("hi must exceed lo on every axis")
        if any(s < MIN_POINTS_PER_AXIS for s in self.shape):
            raise ValueError(f"need at least {MIN_POINTS_PER_AXIS} points per axis")
        return self

    @classmethod
    def cube(cls, n: int, points: int, lo: float = -1.0, hi: float = 1.0) -> "GridSpec":
        dim = 2 * n
        return cls(n=n, lo=(lo,) * dim, hi=(hi,) * dim, shape=(points,) * dim)

    def refined(self, scale: float) -> "GridSpec":
        """Grid with spacing divided by `scale` (points - 1 multiplied)."""
        shape = tuple(int(round((s - 1) * scale)) + 1 for s in self.shape)
        return GridSpec(n=self.n, lo=self.lo, hi=self.hi, shape=shape)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def h(self) -> np.ndarray:
        return (np.array(self.hi) - np.array(self.lo)) / (np.array(self.shape) - 1)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(s - 2 for s in self.shape)

    @property
    def interior_size(self) -> int:
        return int(np.prod(self.interior_shape))

    @property
    def interior(self) -> tuple[slice, ...]:
        return (slice(1, -1),) * self.dim

    @property
    def axes(self) -> list[np.ndarray]:
        return [np.linspace(l, h, s) for l, h, s in zip(self.lo, self.hi, self.shape)]

    def points(self) -> np.ndarray:
        """Coordinates of every grid point, shape (*shape, 2n)."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def interior_points(self) -> np.ndarray:
        return self.points()[self.interior]

    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[self.interior] = False
        return mask


class GridFunction(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: GridSpec
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_float_array(cls, v):
        return np.array(v, dtype=float)

    @model_validator(mode="after")
    def _check(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function has non-finite values")
        return self

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior]

    def boundary_values(self) -> np.ndarray:
        return self.values[self.grid.boundary_mask()]

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(grid=self.grid, values=values)


class HermitianField(BaseModel):
    """One Hermitian n x n matrix per interior grid point."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: GridSpec
    data: np.ndarray

    @model_validator(mode="after")
    def _check(self):
        expected = self.grid.interior_shape + (self.grid.n, self.grid.n)
        if self.data.shape != expected:
            raise ValueError(f"field shape {self.data.shape} != {expected}")
        if hermitian_defect(self.data) > HERMITIAN_TOL:
            raise ValueError("field is not Hermitian")
        object.__setattr__(self, "data", symmetrize(np.asarray(self.data, dtype=complex)))
        return self

    @classmethod
    def constant(cls, grid: GridSpec, matrix: np.ndarray) -> "HermitianField":
        matrix = np.asarray(matrix, dtype=complex)
        data = np.broadcast_to(matrix, grid.interior_shape + matrix.shape)
        return cls(grid=grid, data=np.array(data))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "HermitianField":
        return cls.constant(grid, np.zeros((grid.n, grid.n)))
