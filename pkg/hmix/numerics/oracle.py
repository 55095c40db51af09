"""Brute-force references for the test suites.

Nothing here calls the production sigma recurrence, the Jacobi solver or the
sparse Newton assembly: subsets are enumerated, eigenvalues come from LAPACK
and the tiny solve differences its own residual map.
"""

import itertools
import logging
import math

import numpy as np

from hmix.core.errors import CONE_EXIT_MSG, ArgumentError, DomainError, NewtonStall
from hmix.models import Coefficients, GridFunction, HermitianMatrix, ProblemSpec
from hmix.numerics import geometry

logger = logging.getLogger(__name__)

MAX_BRUTEFORCE_N = 12
MAX_TINY_UNKNOWNS = 625
MAX_TINY_ITERS = 500


def sigma_bruteforce(k: int, lam) -> float:
    lam = [float(x) for x in np.asarray(lam, dtype=float).ravel()]
    n = len(lam)
    if n > MAX_BRUTEFORCE_N:
        raise ArgumentError(f"subset enumeration limited to n <= {MAX_BRUTEFORCE_N}")
    if not 0 <= k <= n:
        raise ArgumentError(f"sigma index k={k} outside 0..{n}")
    return float(math.fsum(math.prod(c) for c in itertools.combinations(lam, k)))


def _sigma_columns(lam: np.ndarray, k: int) -> np.ndarray:
    """sigma_k over the last axis by summing products of every k-subset of columns."""
    n = lam.shape[-1]
    if k == 0:
        return np.ones(lam.shape[:-1])
    total = np.zeros(lam.shape[:-1])
    for subset in itertools.combinations(range(n), k):
        total = total + np.prod(lam[..., list(subset)], axis=-1)
    return total


def quotient_bruteforce(lam: np.ndarray, beta_l, k: int) -> np.ndarray:
    """(sigma_k - sum_l beta_l sigma_l) / sigma_{k-1} from subset sums."""
    lam = np.asarray(lam, dtype=float)
    numerator = _sigma_columns(lam, k)
    for l in range(k - 1):
        numerator = numerator - np.asarray(beta_l[l]) * _sigma_columns(lam, l)
    return numerator / _sigma_columns(lam, k - 1)


def _admissible(lam: np.ndarray, k: int) -> np.ndarray:
    return np.all(np.stack([_sigma_columns(lam, j) > 0 for j in range(1, k)], axis=-1), axis=-1)


def fd_matrix_gradient(c: Coefficients, a: HermitianMatrix, step: float = 1e-6) -> HermitianMatrix:
    """Central differences of F(A) = G(lambda(A)) along the n^2 real Hermitian basis directions.

    Accurate when eigen-gaps are >= 1e-3 or exactly degenerate.
    """
    entries = a.entries
    n = a.n
    if c.n != n:
        raise ArgumentError(f"coefficients are for n={c.n}, matrix is {n}x{n}")

    def value(m: np.ndarray) -> float:
        lam = np.linalg.eigvalsh(m)
        if not _admissible(lam, c.k):
            raise DomainError(CONE_EXIT_MSG)
        return float(quotient_bruteforce(lam, c.beta_l, c.k))

    def derivative(direction: np.ndarray) -> float:
        return (value(entries + step * direction) - value(entries - step * direction)) / (2.0 * step)

    grad = np.zeros((n, n), dtype=complex)
    for p in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[p, p] = 1.0
        grad[p, p] = derivative(e)
        for q in range(p + 1, n):
            e_re = np.zeros((n, n), dtype=complex)
            e_re[p, q] = e_re[q, p] = 1.0
            e_im = np.zeros((n, n), dtype=complex)
            e_im[p, q], e_im[q, p] = 1j, -1j
            grad[p, q] = 0.5 * (derivative(e_re) + 1j * derivative(e_im))
            grad[q, p] = np.conj(grad[p, q])
    return HermitianMatrix(entries=grad)


def tiny_solve_bruteforce(spec: ProblemSpec, tol: float = 1e-11, max_iter: int = MAX_TINY_ITERS) -> GridFunction:
    """Dense damped Newton on the t = 1 residual map with a differenced Jacobian."""
    grid, k, n = spec.grid, spec.k, spec.n
    size = grid.interior_size
    if size > MAX_TINY_UNKNOWNS:
        raise ArgumentError(f"tiny solve limited to {MAX_TINY_UNKNOWNS} interior unknowns, got {size}")
    alpha = spec.alpha
    beta_l = np.stack([alpha[l] * math.comb(n, k) / math.comb(n, l) for l in range(k - 1)])
    beta = alpha[k - 1] * math.comb(n, k) / math.comb(n, k - 1)
    chi0 = spec.chi0.data
    full = spec.usub.values.copy()

    def residual(x: np.ndarray):
        full[grid.interior] = x.reshape(grid.interior_shape)
        lam = np.linalg.eigvalsh(chi0 + geometry.complex_hessian_data(full, grid))
        ok = bool(np.all(_admissible(lam, k)))
        return (quotient_bruteforce(lam, beta_l, k) - beta).ravel(), ok

    x = spec.usub.interior.ravel().copy()
    r, ok = residual(x)
    if not ok:
        raise DomainError(CONE_EXIT_MSG)
    for it in range(max_iter):
        norm = float(np.max(np.abs(r)))
        if norm <= tol:
            logger.debug("tiny solve converged iters=%d residual=%.3e", it, norm)
            full[grid.interior] = x.reshape(grid.interior_shape)
            return GridFunction(grid=grid, values=full.copy())
        jac = np.empty((size, size))
        for j in range(size):
            eps = 1e-6 * max(1.0, abs(x[j]))
            xp, xm = x.copy(), x.copy()
            xp[j] += eps
            xm[j] -= eps
            jac[:, j] = (residual(xp)[0] - residual(xm)[0]) / (2.0 * eps)
        delta = np.linalg.solve(jac, -r)
        s = 1.0
        while s >= 1e-8:
            r_new, ok = residual(x + s * delta)
            if ok and np.max(np.abs(r_new)) < norm:
                break
            s *= 0.5
        else:
            raise NewtonStall(f"tiny solve line search exhausted at residual {norm:.3e}")
        x, r = x + s * delta, r_new
    raise NewtonStall(f"tiny solve did not converge in {max_iter} iterations")
