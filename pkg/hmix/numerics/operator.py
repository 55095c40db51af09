"""The mixed quotient operator G = sigma_k/sigma_{k-1} - sum_l beta_l sigma_l/sigma_{k-1} on Gamma_{k-1}.

With N = sigma_k - sum_l beta_l sigma_l and D = sigma_{k-1}, f = N/D and
    f_i = (N_i - f D_i) / D,
where N_i, D_i come from sigma_j(lambda|i) since d sigma_j / d lambda_i = sigma_{j-1}(lambda|i).
"""

import logging
import math

import numpy as np

from hmix.core.errors import (
    COEFFICIENT_POSITIVITY_MSG,
    CONE_EXIT_MSG,
    ArgumentError,
    DomainError,
    PreconditionError,
)
from hmix.models import Coefficients, OperatorEval, OperatorFieldEval
from hmix.schemas.report_schema import ConeBoundsReport, DichotomyBranch
from .spectral import eig_hermitian, gradient_from_spectral, jacobi_eigh, matrix_gradient
from .symfun import in_cone, sigma_all, sigma_excl2_table, sigma_excl_table

logger = logging.getLogger(__name__)

EQUATION_TOL = 1e-8
EULER_TOL = 1e-10
CONCAVITY_TOL = 1e-10
QUOTIENT_CEILING = 1e12


# --------------------------
# Coefficients
# --------------------------
def normalize_coefficients(alpha, n: int, k: int) -> Coefficients:
    """alpha_0..alpha_{k-1} -> beta_l = (C_n^k/C_n^l) alpha_l, beta = (C_n^k/C_n^{k-1}) alpha_{k-1}."""
    alpha = np.asarray(alpha, dtype=float)
    if not 2 <= k <= n:
        raise ArgumentError(f"need 2 <= k <= n, got k={k}, n={n}")
    if alpha.shape[0] != k:
        raise ArgumentError(f"expected {k} coefficients alpha_0..alpha_{k - 1}")
    if not np.all(alpha[: k - 1] > 0):
        raise DomainError(COEFFICIENT_POSITIVITY_MSG)
    scale = np.array([math.comb(n, k) / math.comb(n, l) for l in range(k - 1)])
    beta_l = alpha[: k - 1] * scale.reshape((k - 1,) + (1,) * (alpha.ndim - 1))
    beta = alpha[k - 1] * math.comb(n, k) / math.comb(n, k - 1)
    return Coefficients(n=n, k=k, beta_l=beta_l, beta=beta)


def alpha_from_beta(beta, n: int, k: int):
    """Inverse of the right-hand-side normalisation: alpha_{k-1} from beta."""
    return np.asarray(beta, dtype=float) * math.comb(n, k - 1) / math.comb(n, k)


# --------------------------
# Batched kernel
# --------------------------
def _require_cone(lam: np.ndarray, k: int) -> None:
    ok = in_cone(lam, k - 1)
    if not np.all(ok):
        raise DomainError(CONE_EXIT_MSG, points=np.argwhere(~np.atleast_1d(ok)))


def _lower_sum(c: Coefficients, table: np.ndarray, shift: int) -> np.ndarray:
    """sum_{l=0}^{k-2} beta_l * table[..., l - shift], terms with negative index dropped."""
    total = np.zeros(table.shape[:-1])
    for l in range(c.k - 1):
        j = l - shift
        if j >= 0:
            beta = np.asarray(c.beta_l[l])
            beta = beta.reshape(beta.shape + (1,) * (table.ndim - 1 - beta.ndim))
            total = total + beta * table[..., j]
    return total


def evaluate_lambda(lam, c: Coefficients) -> tuple[np.ndarray, np.ndarray]:
    """G and f_i for eigenvalue vectors (..., n); raises DomainError outside Gamma_{k-1}."""
    lam = np.asarray(lam, dtype=float)
    k = c.k
    _require_cone(lam, k)
    sig = sigma_all(lam)
    excl = sigma_excl_table(lam)
    denom = sig[..., k - 1]
    value = (sig[..., k] - _lower_sum(c, sig, 0)) / denom
    num_i = excl[..., k - 1] - _lower_sum(c, excl, 1)
    fprime = (num_i - value[..., None] * excl[..., k - 2]) / denom[..., None]
    return value, fprime


def evaluate(lam, c: Coefficients):
    value, _ = evaluate_lambda(lam, c)
    return float(value) if np.ndim(value) == 0 else value


def quotients(lam, k: int) -> np.ndarray:
    """sigma_l / sigma_{k-1} for l = 0..k."""
    sig = sigma_all(lam)
    return sig[..., : k + 1] / sig[..., k - 1, None]


def evaluate_full(a, c: Coefficients) -> OperatorEval:
    pair = eig_hermitian(a)
    lam = pair.spectrum.values
    value, fprime = evaluate_lambda(lam, c)
    return OperatorEval(
        value=float(value),
        grad_lambda=fprime,
        grad_matrix=matrix_gradient(fprime, pair),
        quotients=quotients(lam, c.k),
    )


def evaluate_field(data: np.ndarray, c: Coefficients) -> OperatorFieldEval:
    """evaluate_full over a batch of Hermitian matrices (..., n, n)."""
    lam, basis = jacobi_eigh(data)
    value, fprime = evaluate_lambda(lam, c)
    return OperatorFieldEval(
        value=value,
        grad_lambda=fprime,
        grad_matrix=gradient_from_spectral(fprime, basis),
        eigenvalues=lam,
    )


def lambda_hessian(lam, c: Coefficients) -> np.ndarray:
    """d^2 f / d lambda_i d lambda_j from f D = N differentiated twice."""
    lam = np.asarray(lam, dtype=float)
    n, k = lam.shape[-1], c.k
    value, fprime = evaluate_lambda(lam, c)
    sig = sigma_all(lam)
    excl = sigma_excl_table(lam)
    excl2 = sigma_excl2_table(lam)
    denom = sig[k - 1]
    d_i = excl[:, k - 2]
    n_ij = excl2[..., k - 2] - _lower_sum(c, excl2, 2)
    d_ij = excl2[..., k - 3] if k >= 3 else np.zeros((n, n))
    hess = (n_ij - np.outer(fprime, d_i) - np.outer(d_i, fprime) - value * d_ij) / denom
    hess[np.arange(n), np.arange(n)] = (-2.0 * fprime * d_i) / denom
    return hess


# --------------------------
# Runtime inequality checks
# --------------------------
def _lower_order_excess(lam, c: Coefficients) -> float:
    """sum_{l<=k-2} (k-l) beta_l sigma_l(lambda)/sigma_{k-1}(lambda)."""
    q = quotients(lam, c.k)
    return float(sum((c.k - l) * float(c.beta_l[l]) * q[l] for l in range(c.k - 1)))


def concavity_inequality_check(lam, mu, c: Coefficients) -> bool:
    """sum_i f_i(lambda) mu_i >= f(mu) + sum_l (k-l) beta_l sigma_l(lambda)/sigma_{k-1}(lambda)."""
    lam, mu = np.sort(np.asarray(lam, float)), np.sort(np.asarray(mu, float))
    _, fprime = evaluate_lambda(lam, c)
    f_mu = evaluate(mu, c)
    lhs = float(fprime @ mu)
    rhs = f_mu + _lower_order_excess(lam, c)
    return lhs >= rhs - CONCAVITY_TOL * max(1.0, abs(lhs), abs(rhs))


def cone_bounds_report(lam, c: Coefficients) -> ConeBoundsReport:
    lam = np.sort(np.asarray(lam, dtype=float))
    n, k = lam.shape[0], c.k
    beta = float(c.beta)
    value, fprime = evaluate_lambda(lam, c)
    if abs(float(value) - beta) > EQUATION_TOL * (1.0 + abs(beta)):
        raise PreconditionError(f"point does not solve G = beta: residual {float(value) - beta:.3e}")
    with np.errstate(all="ignore"):
        q = quotients(lam, k)
        finite = bool(np.all(np.isfinite(q)) and np.all(np.abs(q) < QUOTIENT_CEILING))
        trace = float(np.sum(fprime))
        trace_lower = (n - k + 1) / k
        euler_lhs = float(fprime @ lam)
        euler_rhs = beta + _lower_order_excess(lam, c)
        upper = n - k - 1 + (n - k + 2) * float(q[k - 2]) * beta
    return ConeBoundsReport(
        quotients=[float(x) for x in q],
        quotients_positive=bool(np.all(q[: k - 1] > 0)),
        ratio_lower_ok=bool(q[k] > -abs(beta)),
        trace=trace,
        trace_lower=trace_lower,
        trace_ok=trace >= trace_lower - 1e-12,
        trace_upper_observed=upper,
        euler_lhs=euler_lhs,
        euler_rhs=euler_rhs,
        euler_ok=abs(euler_lhs - euler_rhs) <= EULER_TOL * max(1.0, abs(euler_rhs)),
        finite=finite,
    )


def subsolution_dichotomy_check(lam, mu, c: Coefficients, theta: float, big_n: float) -> DichotomyBranch:
    """Which alternative of the subsolution dichotomy holds at a large-eigenvalue point.

    Diagnostic only: theta and N are calibrated empirically per problem family.
    """
    lam, mu = np.sort(np.asarray(lam, float)), np.sort(np.asarray(mu, float))
    k, beta = c.k, float(c.beta)
    _require_cone(mu, k)
    excl = sigma_excl_table(mu)
    lower = excl[:, k - 2]
    if np.any(lower <= 0):
        raise ArgumentError("sigma_{k-2}(mu|i) must be positive")
    strict = (excl[:, k - 1] - _lower_sum(c, excl, 1)) / lower
    if not np.all(strict > beta):
        raise ArgumentError("mu violates the strict subsolution inequality")
    value, fprime = evaluate_lambda(lam, c)
    if abs(float(value) - beta) > EQUATION_TOL * (1.0 + abs(beta)):
        raise ArgumentError("lambda does not solve G = beta")

    imax = int(np.argmax(lam))
    if lam[imax] < big_n:
        return DichotomyBranch.NOT_APPLICABLE
    if float(fprime @ (mu - lam)) >= theta + theta * float(np.sum(fprime)):
        return DichotomyBranch.FIRST_BRANCH
    if fprime[imax] * lam[imax] >= theta:
        return DichotomyBranch.SECOND_BRANCH
    logger.warning("dichotomy calibration miss theta=%g N=%g lambda_max=%g", theta, big_n, lam[imax])
    return DichotomyBranch.NEITHER
