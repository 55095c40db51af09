"""Elementary symmetric functions, their exclusions, and Garding-cone membership.

All array functions act on the last axis and broadcast over leading batch axes.
"""

import math
from typing import NamedTuple

import numpy as np

from hmix.core.errors import ArgumentError, DomainError
from hmix.models import ConeReport, Spectrum

# downdated rows whose rounding-error bound exceeds this fraction of the value are recomputed
DOWNDATE_RTOL = 1e-10
EPS = np.finfo(float).eps


def sigma_all(lam) -> np.ndarray:
    """sigma_0..sigma_n by the recurrence s_j(l_1..l_m) = s_j(l_1..l_{m-1}) + l_m s_{j-1}(l_1..l_{m-1})."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    sig = np.zeros(lam.shape[:-1] + (n + 1,))
    sig[..., 0] = 1.0
    for m in range(n):
        sig[..., 1 : m + 2] = sig[..., 1 : m + 2] + lam[..., m, None] * sig[..., 0 : m + 1]
    return sig


def sigma(k: int, lam):
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= k <= n:
        raise ArgumentError(f"sigma index k={k} outside 0..{n}")
    out = sigma_all(lam)[..., k]
    return float(out) if out.ndim == 0 else out


def spectrum(values) -> Spectrum:
    values = np.sort(np.asarray(values, dtype=float))
    return Spectrum(values=values, sigmas=sigma_all(values))


def sigma_excl_table(lam) -> np.ndarray:
    """Table[..., i, j] = sigma_j(lambda | i) for j = 0..n-1.

    Downdates sigma_j(lambda) row by row while tracking a bound on the
    accumulated rounding error; a row is recomputed directly with entry i
    removed when |lambda_i| > 1 or when that bound exceeds DOWNDATE_RTOL of
    any downdated value.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    full = sigma_all(lam)
    # rounding in sigma_all is bounded by (n + 1) eps sigma_j(|lambda|)
    full_err = (n + 1) * EPS * sigma_all(np.abs(lam))
    table = np.zeros(lam.shape[:-1] + (n, n))
    table[..., 0] = 1.0
    err = np.zeros(lam.shape)
    risk = np.abs(lam) > 1.0
    for j in range(1, n):
        prev = lam * table[..., j - 1]
        table[..., j] = full[..., j, None] - prev
        err = np.abs(lam) * err + full_err[..., j, None] + 2.0 * EPS * (np.abs(full[..., j, None]) + np.abs(prev))
        risk |= err > DOWNDATE_RTOL * np.abs(table[..., j])
    for i in range(n):
        rows = risk[..., i]
        if np.any(rows):
            direct = sigma_all(np.delete(lam, i, axis=-1))
            table[..., i, :] = np.where(rows[..., None], direct, table[..., i, :])
    return table


def sigma_excl(k: int, lam, i: int):
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= k <= n - 1:
        raise ArgumentError(f"excluded sigma index k={k} outside 0..{n - 1}")
    if not 0 <= i < n:
        raise ArgumentError(f"entry index i={i} outside 0..{n - 1}")
    out = sigma_excl_table(lam)[..., i, k]
    return float(out) if out.ndim == 0 else out


def sigma_excl2_table(lam) -> np.ndarray:
    """Table[..., p, q, j] = sigma_j(lambda | p q) for p != q, j = 0..n-2; zero on p == q."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    table = np.zeros(lam.shape[:-1] + (n, n, n - 1))
    for p in range(n):
        for q in range(p + 1, n):
            direct = sigma_all(np.delete(lam, [p, q], axis=-1))
            table[..., p, q, :] = direct
            table[..., q, p, :] = direct
    return table


def sigma_excl2(k: int, lam, p: int, q: int) -> float:
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if p == q or not (0 <= p < n and 0 <= q < n):
        raise ArgumentError("need two distinct valid entry indices")
    if not 0 <= k <= n - 2:
        raise ArgumentError(f"doubly excluded sigma index k={k} outside 0..{n - 2}")
    return float(sigma_excl2_table(lam)[..., p, q, k])


def max_cone_index(lam) -> np.ndarray:
    """Largest j with sigma_1..sigma_j all > 0, per batch entry."""
    positive = sigma_all(lam)[..., 1:] > 0
    return np.cumprod(positive, axis=-1).sum(axis=-1)


def in_cone(lam, k: int, margin: float = 0.0) -> np.ndarray:
    """sigma_1..sigma_k all above `margin` (Gamma_k with a safety margin)."""
    if k <= 0:
        return np.ones(np.shape(lam)[:-1], dtype=bool)
    sig = sigma_all(lam)[..., 1 : k + 1]
    return np.all(sig > margin, axis=-1)


def cone_membership(lam) -> ConeReport:
    lam = np.asarray(lam, dtype=float)
    margins = sigma_all(lam)[1:]
    return ConeReport(max_k=int(max_cone_index(lam)), margins=margins)


class NewtonMaclaurin(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def newton_maclaurin(lam, k: int, l: int, r: int, s: int) -> NewtonMaclaurin:
    """[(s_k/C_n^k)/(s_l/C_n^l)]^(1/(k-l)) <= [(s_r/C_n^r)/(s_s/C_n^s)]^(1/(r-s)) on Gamma_k."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not (n >= k > l >= 0 and r > s >= 0 and k >= r and l >= s):
        raise ArgumentError(f"inadmissible indices (k,l,r,s)=({k},{l},{r},{s}) for n={n}")
    if int(max_cone_index(lam)) < k:
        raise DomainError(f"vector is not in Gamma_{k}")
    sig = sigma_all(lam)

    def ratio(a, b):
        return ((sig[a] / math.comb(n, a)) / (sig[b] / math.comb(n, b))) ** (1.0 / (a - b))

    lhs, rhs = float(ratio(k, l)), float(ratio(r, s))
    return NewtonMaclaurin(lhs, rhs, lhs <= rhs + 1e-12 * abs(rhs))
