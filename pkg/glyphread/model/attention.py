"""
Additive soft attention over the feature grid.

score(x_i, h) = w_a . tanh(W_x^T x_i + W_h^T h + b); the weights are the
softmax of the scores and the context is the weighted sum of the cells.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from glyphread.errors import ShapeError
from glyphread.model.encoder import FeatureGrid
from glyphread.model.tensor import Tensor, glorot_uniform, softmax

PREFIX = "attention."


@dataclass
class AttentionParams:
    w_x: Tensor  # D x A
    w_h: Tensor  # H x A
    bias: Tensor  # A
    w_a: Tensor  # A

    @staticmethod
    def view(params: Dict[str, Tensor]) -> "AttentionParams":
        return AttentionParams(
            params[PREFIX + "w_x"], params[PREFIX + "w_h"], params[PREFIX + "bias"], params[PREFIX + "w_a"]
        )

    @property
    def hidden_size(self) -> int:
        return self.w_a.shape[0]


@dataclass
class AttentionStep:
    scores: Tensor  # K
    weights: Tensor  # K
    context: Tensor  # D


@dataclass
class AttentionCache:
    features: Tensor
    h_prev: Tensor
    hidden: Tensor  # K x A, after tanh
    weights: Tensor


def init_attention(
    feature_size: int, hidden_size: int, attention_size: int, rng: np.random.Generator
) -> Dict[str, Tensor]:
    if attention_size < 1:
        raise ShapeError(f"attention size must be at least 1, got {attention_size}")
    return {
        PREFIX + "w_x": glorot_uniform(rng, (feature_size, attention_size), feature_size, attention_size),
        PREFIX + "w_h": glorot_uniform(rng, (hidden_size, attention_size), hidden_size, attention_size),
        PREFIX + "bias": np.zeros(attention_size),
        PREFIX + "w_a": glorot_uniform(rng, (attention_size,), attention_size, 1),
    }


def _check_dims(features: Tensor, h_prev: Tensor, params: AttentionParams) -> None:
    if features.ndim != 2 or features.shape[1] != params.w_x.shape[0]:
        raise ShapeError(
            f"features of shape {features.shape} do not match W_x of shape {params.w_x.shape}"
        )
    if h_prev.shape != (params.w_h.shape[0],):
        raise ShapeError(
            f"hidden state of shape {h_prev.shape} does not match W_h of shape {params.w_h.shape}"
        )


def attend(
    features: FeatureGrid, h_prev: Tensor, params: AttentionParams
) -> Tuple[AttentionStep, AttentionCache]:
    x = features.vectors
    _check_dims(x, h_prev, params)

    hidden = np.tanh(x @ params.w_x + h_prev @ params.w_h + params.bias)
    scores = hidden @ params.w_a
    weights = softmax(scores)
    context = weights @ x
    return AttentionStep(scores, weights, context), AttentionCache(x, h_prev, hidden, weights)


def attention_backward(
    cache: AttentionCache, grad_z: Tensor, params: AttentionParams
) -> Tuple[Dict[str, Tensor], Tensor, Tensor]:
    """
    Returns (parameter gradients, feature gradient K x D, h_prev gradient).
    """
    x = cache.features
    if grad_z.shape != (x.shape[1],):
        raise ShapeError(f"context gradient has shape {grad_z.shape}, expected {(x.shape[1],)}")

    beta = cache.weights
    grad_x = np.outer(beta, grad_z)
    grad_beta = x @ grad_z
    grad_scores = beta * (grad_beta - beta @ grad_beta)

    grad_w_a = cache.hidden.T @ grad_scores
    grad_pre = np.outer(grad_scores, params.w_a) * (1.0 - cache.hidden ** 2)

    grad_x += grad_pre @ params.w_x.T
    grad_bias = grad_pre.sum(axis=0)
    grads = {
        PREFIX + "w_x": x.T @ grad_pre,
        PREFIX + "w_h": np.outer(cache.h_prev, grad_bias),
        PREFIX + "bias": grad_bias,
        PREFIX + "w_a": grad_w_a,
    }
    grad_h = params.w_h @ grad_bias
    return grads, grad_x, grad_h
