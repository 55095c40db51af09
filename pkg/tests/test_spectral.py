import numpy as np
import pytest

from hmix.core.errors import ArgumentError
from hmix.models import Coefficients
from hmix.numerics.operator import evaluate_lambda, lambda_hessian
from hmix.numerics.spectral import (
    eig_hermitian,
    interlacing_check,
    jacobi_eigh,
    matrix_gradient,
    second_derivative_form,
)
from tests.test_utils import TestAssertions, TestDataFactory


def test_eig_identity():
    pair = eig_hermitian(np.eye(3))
    assert np.allclose(pair.spectrum.values, 1.0)
    assert np.allclose(pair.basis, np.eye(3))


def test_eig_sorted_diagonal():
    pair = eig_hermitian(np.diag([3.0, 1.0]))
    assert np.allclose(pair.spectrum.values, [1.0, 3.0])
    assert np.allclose(pair.basis, [[0.0, 1.0], [1.0, 0.0]])


def test_eig_two_by_two():
    pair = eig_hermitian([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(pair.spectrum.values, [1.0, 3.0], atol=1e-14)
    assert np.allclose(pair.reconstruct(), [[2.0, 1.0], [1.0, 2.0]], atol=1e-14)



def test_jacobi_tiny_off_diagonal_stays_finite():
    a = np.array([[1.0, 1.0, 1e-300], [1.0, 2.0, 0.0], [1e-300, 0.0, 3.0]], dtype=complex)
    a[0, 1], a[1, 0] = 1j, -1j
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        lam, basis = jacobi_eigh(a)
    assert np.allclose(lam, np.linalg.eigvalsh(a), atol=1e-13)
    assert np.allclose((basis * lam) @ basis.conj().T, a, atol=1e-13)
    assert np.all(np.isfinite(basis))


def test_eig_rejects_non_hermitian():
    with pytest.raises(ArgumentError):
        eig_hermitian([[1.0, 2.0], [0.0, 1.0]])


def test_eig_phase_convention(rng):
    a = TestDataFactory.random_hermitian(rng, 4)
    basis = eig_hermitian(a).basis
    for col in basis.T:
        lead = col[np.argmax(np.abs(col) > 1e-12)]
        assert abs(lead.imag) <= 1e-14
        assert lead.real > 0


def test_jacobi_batch_matches_lapack(rng):
    a = TestDataFactory.random_hermitian(rng, 5, batch=(40,))
    lam, basis = jacobi_eigh(a)
    assert np.allclose(lam, np.linalg.eigvalsh(a), atol=1e-12)
    unit = np.conj(np.swapaxes(basis, -1, -2)) @ basis
    assert np.allclose(unit, np.eye(5), atol=1e-12)
    rebuilt = (basis * lam[:, None, :]) @ np.conj(np.swapaxes(basis, -1, -2))
    assert np.allclose(rebuilt, a, atol=1e-12)


def test_jacobi_is_deterministic(rng):
    a = TestDataFactory.random_hermitian(rng, 4, batch=(10,))
    first = jacobi_eigh(a)
    second = jacobi_eigh(a.copy())
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], second[1])


def test_matrix_gradient_trace_is_identity(rng):
    pair = eig_hermitian(TestDataFactory.random_hermitian(rng, 3))
    grad = matrix_gradient(np.ones(3), pair)
    assert np.allclose(grad.entries, np.eye(3), atol=1e-12)


def test_matrix_gradient_diagonal_input():
    pair = eig_hermitian(np.diag([1.0, 2.0, 5.0]))
    grad = matrix_gradient([0.3, 0.2, 0.1], pair)
    assert np.allclose(grad.entries, np.diag([0.3, 0.2, 0.1]))


def test_matrix_gradient_of_sigma2():
    pair = eig_hermitian([[2.0, 1.0], [1.0, 2.0]])
    # d sigma_2 / d lambda_i = sigma_1(lambda | i) = (3, 1) at lambda = (1, 3)
    grad = matrix_gradient([3.0, 1.0], pair)
    assert np.allclose(grad.entries, [[2.0, -1.0], [-1.0, 2.0]], atol=1e-12)
    TestAssertions.assert_hermitian(grad.entries)


def test_matrix_gradient_shape_mismatch():
    pair = eig_hermitian(np.eye(2))
    with pytest.raises(ArgumentError):
        matrix_gradient([1.0, 1.0, 1.0], pair)


def test_second_derivative_linear_function(rng):
    pair = eig_hermitian(TestDataFactory.random_hermitian(rng, 3))
    b = TestDataFactory.random_hermitian(rng, 3)
    assert second_derivative_form(np.zeros((3, 3)), np.ones(3), pair, b) == pytest.approx(0.0, abs=1e-12)


def test_second_derivative_sigma2_diagonal_direction():
    pair = eig_hermitian(np.diag([1.0, 3.0]))
    f_hess = np.array([[0.0, 1.0], [1.0, 0.0]])
    value = second_derivative_form(f_hess, [3.0, 1.0], pair, np.diag([1.0, 0.0]))
    assert value == pytest.approx(0.0, abs=1e-14)


def test_second_derivative_concave_quotient(rng):
    """sigma_2/sigma_1 is concave on Gamma_1 and the form matches a second difference."""
    c = Coefficients(n=3, k=2, beta_l=[0.0], beta=0.0)

    def value_at(m):
        return float(evaluate_lambda(np.linalg.eigvalsh(m), c)[0])

    for _ in range(50):
        a = TestDataFactory.random_positive_hermitian(rng, 3)
        b = TestDataFactory.random_hermitian(rng, 3)
        pair = eig_hermitian(a)
        lam = pair.spectrum.values
        _, fprime = evaluate_lambda(lam, c)
        form = second_derivative_form(lambda_hessian(lam, c), fprime, pair, b)
        assert form <= 1e-10
        step = 1e-4
        fd = (value_at(a + step * b) - 2.0 * value_at(a) + value_at(a - step * b)) / step**2
        assert form == pytest.approx(fd, abs=1e-5 * max(1.0, abs(form)))


def test_second_derivative_dimension_mismatch():
    pair = eig_hermitian(np.eye(2))
    with pytest.raises(ArgumentError):
        second_derivative_form(np.zeros((3, 3)), np.ones(2), pair, np.eye(2))


def test_interlacing_examples(rng):
    assert interlacing_check([[2.0, 1.0], [1.0, 2.0]])
    assert interlacing_check(np.diag([4.0, -1.0, 2.0]))
    for _ in range(100):
        assert interlacing_check(TestDataFactory.random_hermitian(rng, 4))


def test_interlacing_needs_two_rows():
    with pytest.raises(ArgumentError):
        interlacing_check([[1.0]])
