"""Hermitian eigendecomposition and the spectral calculus for F(A) = f(lambda(A))."""

import logging

import numpy as np

from hmix.core.errors import ArgumentError
from hmix.models import EigenPair, HermitianMatrix
from hmix.models.matrix_model import symmetrize
from .symfun import spectrum

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-14
MAX_SWEEPS = 50
DEGENERATE_GAP = 1e-9
INTERLACE_TOL = 1e-10


def _rotation(a: np.ndarray, p: int, q: int) -> np.ndarray:
    """Unitary J with (J* A J)_pq = 0: a phase on column q, then a real Jacobi rotation."""
    n = a.shape[-1]
    apq = a[..., p, q]
    r = np.abs(apq)
    active = r > 0
    r_safe = np.where(active, r, 1.0)
    phase = np.where(active, apq / r_safe, 1.0)
    # tangent of the rotation angle; never forms d / r
    d = 0.5 * (a[..., q, q].real - a[..., p, p].real)
    sign = np.where(d >= 0, 1.0, -1.0)
    den = np.where(active, np.abs(d) + np.hypot(d, r), 1.0)
    t = np.where(active, sign * r / den, 0.0)
    c = 1.0 / np.sqrt(t**2 + 1.0)
    s = t * c
    rot = np.zeros(a.shape[:-2] + (n, n), dtype=complex)
    rot[..., np.arange(n), np.arange(n)] = 1.0
    rot[..., p, p] = c
    rot[..., p, q] = s
    rot[..., q, p] = -s * np.conj(phase)
    rot[..., q, q] = c * np.conj(phase)
    return rot


def _off_norm(a: np.ndarray) -> np.ndarray:
    diag = np.diagonal(a, axis1=-2, axis2=-1)
    total = np.sum(np.abs(a) ** 2, axis=(-2, -1))
    return np.sqrt(np.maximum(total - np.sum(np.abs(diag) ** 2, axis=-1), 0.0))


def jacobi_eigh(a) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi over a batch of Hermitian matrices (..., n, n).

    Fixed sweep order (p, q) = (0,1), (0,2), ..., (n-2,n-1). Returns ascending
    eigenvalues and eigenvector columns whose first nonzero component is real
    and positive.
    """
    a = symmetrize(np.array(a, dtype=complex))
    n = a.shape[-1]
    vecs = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    tol = JACOBI_TOL * np.linalg.norm(a, axis=(-2, -1))
    for _ in range(MAX_SWEEPS):
        if np.all(_off_norm(a) <= tol):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                rot = _rotation(a, p, q)
                a = np.conj(np.swapaxes(rot, -1, -2)) @ a @ rot
                vecs = vecs @ rot
        a = symmetrize(a)
    if not np.all(_off_norm(a) <= tol):
        logger.warning("jacobi: off-diagonal norm above tolerance after %d sweeps", MAX_SWEEPS)

    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    vecs = np.take_along_axis(vecs, order[..., None, :], axis=-1)

    mags = np.abs(vecs)
    first = np.argmax(mags > 1e-12 * np.max(mags, axis=-2, keepdims=True), axis=-2)
    lead = np.take_along_axis(vecs, first[..., None, :], axis=-2)
    lead_abs = np.abs(lead)
    phase = np.where(lead_abs > 0, lead / np.where(lead_abs > 0, lead_abs, 1.0), 1.0)
    vecs = vecs * np.conj(phase)
    return w, vecs


def eig_hermitian(a) -> EigenPair:
    matrix = HermitianMatrix.from_array(a)
    w, vecs = jacobi_eigh(matrix.entries)
    return EigenPair(spectrum=spectrum(w), basis=vecs)


def gradient_from_spectral(fprime: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """basis . diag(fprime) . basis*, batched."""
    return (basis * fprime[..., None, :]) @ np.conj(np.swapaxes(basis, -1, -2))


def matrix_gradient(fprime, pair: EigenPair) -> HermitianMatrix:
    fprime = np.asarray(fprime, dtype=float)
    if fprime.shape != (pair.spectrum.n,):
        raise ArgumentError(f"fprime has shape {fprime.shape}, expected ({pair.spectrum.n},)")
    return HermitianMatrix(entries=gradient_from_spectral(fprime, pair.basis))


def second_derivative_form(f_hess, fprime, pair: EigenPair, b) -> float:
    """d^2/dt^2 f(lambda(A + tB)) at t = 0.

    Uses f_hess[p][q] b~_pp b~_qq + 2 sum_{p<q} (f_p - f_q)/(lambda_p - lambda_q) |b~_pq|^2,
    b~ = U* B U; nearly equal eigenvalues take the limit f_hess[p][p] - f_hess[p][q].
    """
    lam = pair.spectrum.values
    n = lam.shape[0]
    f_hess = np.asarray(f_hess, dtype=float)
    fprime = np.asarray(fprime, dtype=float)
    b = HermitianMatrix.from_array(b).entries
    if f_hess.shape != (n, n) or fprime.shape != (n,) or b.shape != (n, n):
        raise ArgumentError("dimension mismatch in second_derivative_form")
    bt = np.conj(pair.basis.T) @ b @ pair.basis
    diag = bt.diagonal().real
    total = float(diag @ f_hess @ diag)
    for p in range(n):
        for q in range(p + 1, n):
            gap = lam[p] - lam[q]
            if abs(gap) < DEGENERATE_GAP * (1.0 + abs(lam[p])):
                dd = f_hess[p, p] - f_hess[p, q]
            else:
                dd = (fprime[p] - fprime[q]) / gap
            total += 2.0 * dd * abs(bt[p, q]) ** 2
    return total


def interlacing_check(a) -> bool:
    """Eigenvalues of the leading (n-1) minor interlace those of A."""
    matrix = HermitianMatrix.from_array(a)
    n = matrix.n
    if n < 2:
        raise ArgumentError("interlacing needs n >= 2")
    lam, _ = jacobi_eigh(matrix.entries)
    minor, _ = jacobi_eigh(matrix.entries[: n - 1, : n - 1])
    tol = INTERLACE_TOL * matrix.norm()
    return bool(np.all(lam[:-1] - tol <= minor) and np.all(minor <= lam[1:] + tol))
