import numpy as np
import pytest

from hmix.core.errors import ArgumentError, DomainError
from hmix.models import Coefficients, GridSpec, HermitianField, HermitianMatrix
from hmix.numerics import oracle
from hmix.numerics.operator import evaluate, evaluate_lambda
from hmix.schemas.descriptor_schema import RadialQuadraticDescriptor
from hmix.services.suite_service import cone_samples


def test_fd_gradient_at_identity():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    grad = oracle.fd_matrix_gradient(c, HermitianMatrix(entries=np.eye(3)))
    assert np.allclose(grad.entries, 4.0 / 9.0 * np.eye(3), atol=1e-7)


def test_fd_gradient_diagonal_matrix():
    c = Coefficients(n=3, k=3, beta_l=[0.2, 0.4], beta=0.0)
    lam = np.array([1.0, 2.0, 4.0])
    grad = oracle.fd_matrix_gradient(c, HermitianMatrix(entries=np.diag(lam)))
    _, fprime = evaluate_lambda(lam, c)
    assert np.allclose(grad.entries, np.diag(fprime), atol=1e-7)


def test_fd_gradient_dimension_mismatch():
    c = Coefficients(n=3, k=2, beta_l=[1.0], beta=0.0)
    with pytest.raises(ArgumentError):
        oracle.fd_matrix_gradient(c, HermitianMatrix(entries=np.eye(2)))


def test_fd_gradient_loses_admissibility():
    c = Coefficients(n=2, k=2, beta_l=[1.0], beta=0.0)
    with pytest.raises(DomainError):
        oracle.fd_matrix_gradient(c, HermitianMatrix(entries=np.diag([-1.0, 1.0])))


def test_quotient_bruteforce_matches_operator(rng):
    lam = cone_samples(rng, 4, 2, 50, margin=1e-2)
    beta_l = [0.3, 0.7]
    c = Coefficients(n=4, k=3, beta_l=beta_l, beta=0.0)
    assert np.allclose(oracle.quotient_bruteforce(lam, beta_l, 3), evaluate(lam, c), rtol=1e-12, atol=1e-12)


def test_tiny_solve_recovers_quadratic(problems):
    grid = GridSpec.cube(2, 5)
    mp = problems.manufacture(grid, 2, HermitianField.zeros(grid), [0.5], RadialQuadraticDescriptor(a=1.0))
    u = oracle.tiny_solve_bruteforce(mp.spec)
    assert np.max(np.abs(u.values - mp.ustar.values)) <= 1e-10


def test_tiny_solve_size_limit(problems):
    grid = GridSpec.cube(2, 9)
    mp = problems.manufacture(grid, 2, HermitianField.zeros(grid), [0.5], RadialQuadraticDescriptor(a=1.0))
    with pytest.raises(ArgumentError):
        oracle.tiny_solve_bruteforce(mp.spec)


@pytest.mark.slow
def test_tiny_solve_matches_continuity_solve(solver, quartic_problem):
    _, spec = quartic_problem
    u, _ = solver.continuity_solve(spec)
    reference = oracle.tiny_solve_bruteforce(spec)
    assert np.max(np.abs(u.values - reference.values)) <= 1e-7
