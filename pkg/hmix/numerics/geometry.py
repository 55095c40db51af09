"""Finite differences on box grids in C^n = R^{2n}.

Grid arrays are row-major with axes x^1..x^n, y^1..y^n. Stencils produce
values at interior points only; Dirichlet data lives on the boundary layer.
"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from hmix.core.errors import GRID_MISMATCH_MSG, ArgumentError, DomainError, LinearFailure
from hmix.models import GridFunction, GridSpec, HermitianField
from hmix.models.matrix_model import symmetrize

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# --------------------------
# Stencils
# --------------------------
def _shifted(values: np.ndarray, offsets: dict[int, int]) -> np.ndarray:
    """values at interior points shifted by `offsets` (axis -> +/-1)."""
    index = []
    for axis, size in enumerate(values.shape):
        o = offsets.get(axis, 0)
        index.append(slice(1 + o, size - 1 + o))
    return values[tuple(index)]


def real_hessian_data(values: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Central-difference real Hessian at interior points, shape (*interior_shape, 2n, 2n)."""
    dim = values.ndim
    center = _shifted(values, {})
    hess = np.empty(center.shape + (dim, dim))
    for a in range(dim):
        hess[..., a, a] = (_shifted(values, {a: 1}) - 2.0 * center + _shifted(values, {a: -1})) / h[a] ** 2
        for b in range(a + 1, dim):
            cross = (
                _shifted(values, {a: 1, b: 1})
                - _shifted(values, {a: 1, b: -1})
                - _shifted(values, {a: -1, b: 1})
                + _shifted(values, {a: -1, b: -1})
            ) / (4.0 * h[a] * h[b])
            hess[..., a, b] = hess[..., b, a] = cross
    return hess


def complex_from_real_hessian(hess: np.ndarray) -> np.ndarray:
    """u_{i jbar} = 1/4 [(u_{x_i x_j} + u_{y_i y_j}) + i (u_{x_i y_j} - u_{y_i x_j})]."""
    n = hess.shape[-1] // 2
    xx, yy = hess[..., :n, :n], hess[..., n:, n:]
    xy, yx = hess[..., :n, n:], hess[..., n:, :n]
    return symmetrize(0.25 * ((xx + yy) + 1j * (xy - yx)))


def complex_hessian_data(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    if values.shape != grid.shape:
        raise ArgumentError(GRID_MISMATCH_MSG)
    return complex_from_real_hessian(real_hessian_data(values, grid.h))


def complex_hessian(u: GridFunction) -> HermitianField:
    return HermitianField(grid=u.grid, data=complex_hessian_data(u.values, u.grid))


def chi_u(u: GridFunction, chi0: HermitianField) -> HermitianField:
    if u.grid != chi0.grid:
        raise ArgumentError(GRID_MISMATCH_MSG)
    return HermitianField(grid=u.grid, data=chi0.data + complex_hessian_data(u.values, u.grid))


def gradient_data(values: np.ndarray, h: np.ndarray) -> np.ndarray:
    dim = values.ndim
    parts = [(_shifted(values, {a: 1}) - _shifted(values, {a: -1})) / (2.0 * h[a]) for a in range(dim)]
    return np.stack(parts, axis=-1)


def gradient_sup(u: GridFunction) -> float:
    grad = gradient_data(u.values, u.grid.h)
    return float(np.max(np.linalg.norm(grad, axis=-1)))


# --------------------------
# Linearized operator
# --------------------------
def real_coefficients(data: np.ndarray) -> np.ndarray:
    """Symmetric 2n x 2n C with sum_ab C_ab v_ab = Re tr(G . ddbar v), G = R + iI.

    C = 1/4 [[R, I], [-I, R]].
    """
    re, im = data.real, data.imag
    top = np.concatenate([re, im], axis=-1)
    bottom = np.concatenate([-im, re], axis=-1)
    return 0.25 * np.concatenate([top, bottom], axis=-2)


def _require_positive_definite(data: np.ndarray) -> None:
    lowest = np.linalg.eigvalsh(data)[..., 0]
    bad = ~(lowest > 0)
    if np.any(bad):
        raise DomainError(
            "linearized coefficient is not positive definite",
            points=np.argwhere(bad) + 1,
        )


def linearized_stencil(coeff: Union[HermitianField, np.ndarray], grid: GridSpec = None) -> sparse.csr_matrix:
    """Sparse real operator v -> G^{i jbar} v_{i jbar} on the full grid; boundary rows are identity."""
    if isinstance(coeff, HermitianField):
        grid, data = coeff.grid, coeff.data
    else:
        data = np.asarray(coeff)
        if grid is None or data.shape != grid.interior_shape + (grid.n, grid.n):
            raise ArgumentError(GRID_MISMATCH_MSG)
    _require_positive_definite(data)
    c = real_coefficients(data)
    diag = np.diagonal(c, axis1=-2, axis2=-1)
    assert np.all(diag > 0), "pure second-derivative weights must be positive"

    h = grid.h
    index = np.arange(grid.size).reshape(grid.shape)
    center = _shifted(index, {}).ravel()
    rows, cols, vals = [], [], []

    def add(offsets, weight):
        rows.append(center)
        cols.append(_shifted(index, offsets).ravel())
        vals.append(np.broadcast_to(weight, grid.interior_shape).ravel())

    for a in range(grid.dim):
        w = c[..., a, a] / h[a] ** 2
        add({}, -2.0 * w)
        add({a: 1}, w)
        add({a: -1}, w)
        for b in range(a + 1, grid.dim):
            w = 2.0 * c[..., a, b] / (4.0 * h[a] * h[b])
            if not np.any(w):
                continue
            add({a: 1, b: 1}, w)
            add({a: 1, b: -1}, -w)
            add({a: -1, b: 1}, -w)
            add({a: -1, b: -1}, w)

    boundary = index[grid.boundary_mask()]
    rows.append(boundary)
    cols.append(boundary)
    vals.append(np.ones(boundary.shape[0]))
    matrix = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.size, grid.size),
    )
    return matrix.tocsr()


def laplacian_stencil(grid: GridSpec) -> sparse.csr_matrix:
    """Delta_C = 1/4 Delta_{R^2n}: the identity-coefficient linearized operator."""
    return linearized_stencil(HermitianField.constant(grid, np.eye(grid.n)))


def interior_blocks(matrix: sparse.csr_matrix, grid: GridSpec):
    index = np.arange(grid.size).reshape(grid.shape)
    inner = index[grid.interior].ravel()
    outer = index[grid.boundary_mask()]
    rows = matrix[inner]
    return rows[:, inner], rows[:, outer], inner, outer


def solve_dirichlet(
    matrix: sparse.csr_matrix,
    rhs: np.ndarray,
    boundary: np.ndarray,
    grid: GridSpec,
    tol: float = 1e-12,
    direct_max_unknowns: int = 20000,
) -> np.ndarray:
    """Solve L x = rhs at interior points with x = boundary on the boundary layer.

    `rhs` has the interior shape, `boundary` the full grid shape (only the
    boundary layer is read). Returns the full-grid solution.
    """
    a_ii, a_ib, inner, outer = interior_blocks(matrix, grid)
    full = np.asarray(boundary, dtype=float).ravel().copy()
    b = np.asarray(rhs, dtype=float).ravel() - a_ib @ full[outer]
    a_ii = a_ii.tocsc()
    if inner.size <= direct_max_unknowns:
        try:
            x = sparse_linalg.splu(a_ii).solve(b)
        except RuntimeError as exc:
            raise LinearFailure(f"sparse factorization failed: {exc}") from exc
    else:
        ilu = sparse_linalg.spilu(a_ii, drop_tol=1e-5, fill_factor=10)
        precond = sparse_linalg.LinearOperator(a_ii.shape, ilu.solve)
        x, info = sparse_linalg.gmres(a_ii, b, rtol=tol, restart=50, maxiter=200, M=precond)
        if info != 0:
            raise LinearFailure(f"gmres did not reach rtol={tol:g} (info={info})")
    if not np.all(np.isfinite(x)):
        raise LinearFailure("linear solve produced non-finite values")
    rel = np.linalg.norm(a_ii @ x - b) / max(np.linalg.norm(b), 1e-300)
    logger.debug("linear solve unknowns=%d relres=%.3e", inner.size, rel)
    full[inner] = x
    return full.reshape(grid.shape)


# --------------------------
# Field I/O
# --------------------------
def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def dump_field(u: GridFunction, path: PathLike) -> tuple[Path, Path]:
    """Flat '<f8' values in row-major index order plus a JSON GridSpec sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.ascontiguousarray(u.values, dtype="<f8").tofile(path)
    meta = sidecar_path(path)
    meta.write_text(json.dumps({"grid": u.grid.model_dump(mode="json"), "dtype": "<f8", "order": "C"}, indent=2))
    return path, meta


def load_field(path: PathLike) -> GridFunction:
    path = Path(path)
    meta = json.loads(sidecar_path(path).read_text())
    grid = GridSpec.model_validate(meta["grid"])
    values = np.fromfile(path, dtype="<f8").reshape(grid.shape)
    return GridFunction(grid=grid, values=values)


def export_csv_slice(u: GridFunction, path: PathLike) -> Path:
    """x, y, value rows on the (x^1, y^1) plane; other axes fixed at their middle index."""
    grid = u.grid
    n = grid.n
    index = [s // 2 for s in grid.shape]
    index[0] = index[n] = slice(None)
    plane = u.values[tuple(index)]
    xs, ys = np.meshgrid(grid.axes[0], grid.axes[n], indexing="ij")
    table = np.column_stack([xs.ravel(), ys.ravel(), plane.ravel()])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, table, delimiter=",", header="x,y,value", comments="", fmt="%.17g")
    return path
