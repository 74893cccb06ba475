"""
Dense double-precision helpers shared by the model, the loss and the search.

Tensors are plain ``numpy`` arrays of dtype float64. The functions here add the
shape checks and the numerically stable forms the rest of the package relies on.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from glyphread.errors import NumericError, ShapeError

Tensor = np.ndarray


def as_tensor(values, shape: Optional[Tuple[int, ...]] = None) -> Tensor:
    result = np.asarray(values, dtype=np.float64)
    if shape is not None and result.shape != tuple(shape):
        raise ShapeError(f"expected shape {tuple(shape)}, got {result.shape}")
    return result


def check_shape(name: str, tensor: Tensor, shape: Tuple[int, ...]) -> None:
    if tensor.shape != tuple(shape):
        raise ShapeError(f"{name} has shape {tensor.shape}, expected {tuple(shape)}")


def check_finite(name: str, tensor: Tensor) -> None:
    if not np.all(np.isfinite(tensor)):
        raise NumericError(f"{name} contains non-finite values")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def sigmoid(x: Tensor) -> Tensor:
    # split by sign so neither branch overflows
    result = np.empty_like(x, dtype=np.float64)
    positive = x >= 0
    result[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    result[~positive] = exp_x / (1.0 + exp_x)
    return result


def logsumexp(v: Tensor) -> float:
    if v.size == 0:
        raise ShapeError("log-sum-exp of an empty vector")
    top = np.max(v)
    if not np.isfinite(top):
        return float(top)
    return float(top + np.log(np.sum(np.exp(v - top))))


def softmax(v: Tensor) -> Tensor:
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"softmax expects a non-empty vector, got shape {v.shape}")
    shifted = np.exp(v - np.max(v))
    return shifted / np.sum(shifted)


def log_softmax(v: Tensor) -> Tensor:
    if v.ndim != 1 or v.size == 0:
        raise ShapeError(f"log-softmax expects a non-empty vector, got shape {v.shape}")
    return v - logsumexp(v)


def glorot_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int) -> Tensor:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def finite_diff_grad(f: Callable[[Tensor], float], x: Tensor, eps: float = 1e-5) -> Tensor:
    """
    Central-difference gradient of the scalar function ``f`` at ``x``.

    ``x`` is perturbed in place one coordinate at a time and restored
    afterwards, so ``f`` may close over the very array being differentiated.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")

    grad = np.zeros(x.shape, dtype=np.float64)
    for index in np.ndindex(*x.shape):
        original = x[index]
        x[index] = original + eps
        f_plus = f(x)
        x[index] = original - eps
        f_minus = f(x)
        x[index] = original
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NumericError(f"function is not finite around coordinate {index}")
        grad[index] = (f_plus - f_minus) / (2 * eps)
    return grad
