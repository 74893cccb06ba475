import pytest
import math

import numpy as np

from glyphread.errors import NumericError, ShapeError
from glyphread.model.tensor import (
    as_tensor,
    check_finite,
    finite_diff_grad,
    glorot_uniform,
    log_softmax,
    logsumexp,
    matmul,
    sigmoid,
    softmax,
)


def test_matmul_names_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\) and \(2, 3\)"):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_as_tensor_checks_shape():
    assert as_tensor([[1, 2]], (1, 2)).dtype == np.float64
    with pytest.raises(ShapeError):
        as_tensor([1, 2, 3], (2,))


@pytest.mark.parametrize("values", [
    [0.0, 0.0],
    [1000.0, -1000.0],
    [-745.0, -746.0, 3.0],
    [1e-3, 2e-3, 3e-3, 700.0],
])
def test_softmax_is_stable_and_normalized(values):
    p = softmax(np.array(values))
    assert np.all(np.isfinite(p))
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(np.exp(log_softmax(np.array(values))), p)


def test_softmax_of_empty_vector():
    with pytest.raises(ShapeError):
        softmax(np.array([]))


def test_logsumexp_matches_naive_form():
    v = np.array([0.5, -1.0, 2.0])
    assert logsumexp(v) == pytest.approx(math.log(np.exp(v).sum()))
    assert logsumexp(np.array([-np.inf, -np.inf])) == -np.inf


def test_sigmoid_extremes():
    s = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
    assert s.tolist() == [0.0, 0.5, 1.0]


def test_check_finite():
    check_finite("ok", np.ones(3))
    with pytest.raises(NumericError, match="grads"):
        check_finite("grads", np.array([1.0, np.nan]))


def test_glorot_uniform_bounds():
    w = glorot_uniform(np.random.default_rng(0), (20, 30), 20, 30)
    limit = math.sqrt(6.0 / 50)
    assert w.shape == (20, 30)
    assert np.all(np.abs(w) <= limit)


def test_finite_diff_grad_of_quadratic():
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    x = np.array([0.5, -1.0])
    grad = finite_diff_grad(lambda v: float(v @ a @ v), x)
    assert np.allclose(grad, 2 * a @ x, atol=1e-8)
    # restored after perturbing
    assert x.tolist() == [0.5, -1.0]


def test_finite_diff_grad_rejects_bad_eps():
    with pytest.raises(ValueError):
        finite_diff_grad(lambda v: 0.0, np.zeros(2), eps=0.0)


def test_finite_diff_grad_rejects_non_finite_function():
    with pytest.raises(NumericError):
        finite_diff_grad(lambda v: float("nan"), np.zeros(2))


def test_matmul_examples():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert matmul(a, np.array([[0.0], [1.0]])).tolist() == [[2.0], [4.0]]
    assert np.array_equal(matmul(np.eye(2), a), a)
    assert np.array_equal(matmul(a, np.eye(2)), a)


def test_matmul_is_associative():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a, b, c = rng.normal(size=(3, 4, 4))
        assert np.allclose(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), rtol=0, atol=1e-9)


def test_softmax_over_random_vectors():
    rng = np.random.default_rng(12)
    for _ in range(10_000):
        v = rng.uniform(-50.0, 50.0, size=int(rng.integers(1, 30)))
        p = softmax(v)
        assert abs(p.sum() - 1.0) <= 1e-12
        assert np.all(p >= 0)


@pytest.mark.parametrize("shift", [-100.0, -1.5, 0.0, 3.0, 500.0])
def test_softmax_ignores_constant_shift(shift):
    v = np.random.default_rng(13).uniform(-50.0, 50.0, size=12)
    assert np.allclose(softmax(v + shift), softmax(v), rtol=0, atol=1e-12)
