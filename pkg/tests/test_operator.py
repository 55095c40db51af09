import numpy as np
import pytest

from hmix.core.errors import COEFFICIENT_POSITIVITY_MSG, ArgumentError, DomainError, PreconditionError
from hmix.models import Coefficients, HermitianMatrix
from hmix.numerics import oracle
from hmix.numerics.operator import (
    alpha_from_beta,
    concavity_inequality_check,
    cone_bounds_report,
    evaluate,
    evaluate_field,
    evaluate_full,
    evaluate_lambda,
    lambda_hessian,
    normalize_coefficients,
    quotients,
    subsolution_dichotomy_check,
)
from hmix.schemas import DichotomyBranch
from hmix.services.suite_service import cone_samples
from tests.test_utils import TestDataFactory


def test_normalize_coefficients():
    c = normalize_coefficients([0.2, 0.7], n=3, k=2)
    assert np.allclose(c.beta_l, [0.6])
    assert float(c.beta) == pytest.approx(0.7)

    c = normalize_coefficients([0.3, 0.8], n=2, k=2)
    assert np.allclose(c.beta_l, [0.3])
    assert float(c.beta) == pytest.approx(0.4)
    assert float(alpha_from_beta(c.beta, 2, 2)) == pytest.approx(0.8)


def test_normalize_coefficient_fields():
    alpha = np.stack([np.full((3, 4), 0.5), np.full((3, 4), 1.0), np.full((3, 4), 2.0)])
    c = normalize_coefficients(alpha, n=4, k=3)
    assert c.beta_l.shape == (2, 3, 4)
    assert np.allclose(c.beta_l[0], 4 * 0.5)
    assert np.allclose(c.beta_l[1], 1.0)
    assert np.allclose(c.beta, 2.0 * 4 / 6)


def test_normalize_rejects_nonpositive_lower_coefficient():
    with pytest.raises(DomainError) as exc:
        normalize_coefficients([0.0, 1.0], n=2, k=2)
    assert exc.value.detail == COEFFICIENT_POSITIVITY_MSG
    with pytest.raises(ArgumentError):
        normalize_coefficients([1.0, 1.0], n=2, k=3)



def test_coefficients_accept_zero_lower_order():
    c = Coefficients(n=3, k=3, beta_l=[0.0, 0.0], beta=0.0)
    # complex Hessian quotient sigma_3 / sigma_2
    assert evaluate([1.0, 1.0, 1.0], c) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        Coefficients(n=3, k=3, beta_l=[0.0, -0.1], beta=0.0)
    with pytest.raises(DomainError):
        normalize_coefficients([0.0, 0.0, 1.0], n=3, k=3)


def test_evaluate_identity_values():
    c3 = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    assert evaluate([1.0, 1.0, 1.0], c3) == pytest.approx(2.0 / 3.0)
    c2 = Coefficients(n=2, k=2, beta_l=[0.5], beta=0.0)
    assert evaluate([1.0, 1.0], c2) == pytest.approx(0.25)


def test_evaluate_full_identity():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    ev = evaluate_full(np.eye(3), c)
    assert ev.value == pytest.approx(2.0 / 3.0)
    assert np.allclose(ev.grad_lambda, 4.0 / 9.0)
    assert np.allclose(ev.grad_matrix.entries, 4.0 / 9.0 * np.eye(3))
    assert np.allclose(ev.quotients, [1.0 / 3.0, 1.0, 1.0])


def test_evaluate_outside_cone():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    with pytest.raises(DomainError):
        evaluate([-1.0, -1.0, -1.0], c)
    c3 = Coefficients(n=3, k=3, beta_l=[1.0, 1.0], beta=0.0)
    with pytest.raises(DomainError) as exc:
        evaluate_lambda(np.array([[1.0, 1.0, 1.0], [3.0, 3.0, -2.0]]), c3)
    assert exc.value.points == [(1,)]


def test_evaluate_field_matches_pointwise(rng):
    c = Coefficients(n=3, k=3, beta_l=[0.4, 0.3], beta=0.0)
    data = np.stack([TestDataFactory.random_positive_hermitian(rng, 3) for _ in range(6)]).reshape(2, 3, 3, 3)
    field = evaluate_field(data, c)
    assert field.value.shape == (2, 3)
    for idx in np.ndindex(2, 3):
        ev = evaluate_full(data[idx], c)
        assert field.value[idx] == pytest.approx(ev.value, rel=1e-12)
        assert np.allclose(field.grad_matrix[idx], ev.grad_matrix.entries, atol=1e-12)


def test_gradient_matches_finite_differences(rng):
    for n, k in ((2, 2), (3, 2), (3, 3), (4, 3)):
        c = Coefficients(n=n, k=k, beta_l=rng.uniform(0.1, 1.0, size=k - 1), beta=0.0)
        a = TestDataFactory.random_positive_hermitian(rng, n)
        exact = evaluate_full(a, c).grad_matrix.entries
        approx = oracle.fd_matrix_gradient(c, HermitianMatrix(entries=a))
        assert np.linalg.norm(exact - approx.entries) <= 1e-6 * max(1.0, np.linalg.norm(exact))


def test_quotients():
    assert np.allclose(quotients([1.0, 2.0, 3.0], 2), [1.0 / 6.0, 1.0, 11.0 / 6.0])


def test_ellipticity_and_euler_identity(rng):
    for n, k in ((2, 2), (3, 2), (3, 3), (4, 3)):
        lam = cone_samples(rng, n, k - 1, 200, margin=1e-2)
        beta_l = rng.uniform(0.1, 2.0, size=(k - 1, 200))
        c = Coefficients(n=n, k=k, beta_l=beta_l, beta=np.zeros(200))
        value, fprime = evaluate_lambda(lam, c)
        assert np.all(fprime > 0)
        q = quotients(lam, k)
        rhs = value + sum((k - l) * beta_l[l] * q[:, l] for l in range(k - 1))
        assert np.allclose(np.sum(fprime * lam, axis=-1), rhs, rtol=1e-10, atol=1e-10)
        assert np.all(np.sum(fprime, axis=-1) >= (n - k + 1) / k - 1e-12)


def test_lambda_hessian_matches_gradient_differences():
    for k, lam in ((2, np.array([0.7, 1.3, 2.1])), (3, np.array([1.0, 2.0, 3.5])), (3, np.array([0.5, 1.5, 2.5, 4.0]))):
        n = lam.shape[0]
        c = Coefficients(n=n, k=k, beta_l=np.linspace(0.2, 0.4, k - 1), beta=0.0)
        hess = lambda_hessian(lam, c)
        step = 1e-6
        for j in range(n):
            e = np.zeros(n)
            e[j] = step
            fd = (evaluate_lambda(lam + e, c)[1] - evaluate_lambda(lam - e, c)[1]) / (2.0 * step)
            assert np.allclose(hess[:, j], fd, rtol=1e-6, atol=1e-7)
        assert np.allclose(hess, hess.T)
        assert np.max(np.linalg.eigvalsh(hess)) <= 1e-12


def test_concavity_inequality_example():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    assert concavity_inequality_check([1.0, 1.0, 1.0], [1.0, 2.0, 3.0], c)


def test_concavity_inequality_random(rng):
    c = Coefficients(n=3, k=3, beta_l=[0.5, 0.2], beta=0.0)
    lam = cone_samples(rng, 3, 2, 100, margin=1e-2)
    mu = cone_samples(rng, 3, 2, 100, margin=1e-2)
    assert all(concavity_inequality_check(a, b, c) for a, b in zip(lam, mu))


def test_cone_bounds_report_identity():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=2.0 / 3.0)
    report = cone_bounds_report([1.0, 1.0, 1.0], c)
    assert report.ok
    assert report.trace == pytest.approx(4.0 / 3.0)
    assert report.trace_lower == pytest.approx(1.0)
    assert report.euler_lhs == pytest.approx(4.0 / 3.0)
    assert report.euler_rhs == pytest.approx(4.0 / 3.0)
    assert report.quotients_positive


def test_cone_bounds_report_needs_solution():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=1.0)
    with pytest.raises(PreconditionError):
        cone_bounds_report([1.0, 1.0, 1.0], c)


def test_cone_bounds_random_points(rng):
    lam = cone_samples(rng, 4, 2, 100, margin=1e-2)
    for row in lam:
        c = Coefficients(n=4, k=3, beta_l=[0.3, 0.6], beta=0.0)
        value = evaluate(row, c)
        assert cone_bounds_report(row, c.with_beta(value)).ok


def test_dichotomy_branches():
    c = Coefficients(n=2, k=2, beta_l=[0.5], beta=0.25)
    lam = [1.0, 1.0]
    assert subsolution_dichotomy_check(lam, [2.0, 2.0], c, theta=0.1, big_n=10.0) == DichotomyBranch.NOT_APPLICABLE
    assert subsolution_dichotomy_check(lam, [2.0, 2.0], c, theta=0.1, big_n=0.5) == DichotomyBranch.FIRST_BRANCH
    assert subsolution_dichotomy_check(lam, [0.3, 0.3], c, theta=0.3, big_n=0.5) == DichotomyBranch.SECOND_BRANCH
    assert subsolution_dichotomy_check(lam, [0.3, 0.3], c, theta=0.5, big_n=0.5) == DichotomyBranch.NEITHER


def test_dichotomy_preconditions():
    c = Coefficients(n=2, k=2, beta_l=[0.5], beta=0.25)
    with pytest.raises(ArgumentError):
        subsolution_dichotomy_check([1.0, 1.0], [0.2, 5.0], c, theta=0.1, big_n=0.5)
    with pytest.raises(ArgumentError):
        subsolution_dichotomy_check([1.0, 2.0], [2.0, 2.0], c, theta=0.1, big_n=0.5)
