"""
LSTM step, character embedding and the deep output layer.

The gate matrix maps [E y_prev; h_prev; z] to the i, f, o and g blocks, in
that order. The output logits are L_0 (E y_prev + L_h h + L_z z) + b.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from glyphread.errors import ShapeError
from glyphread.model.tensor import Tensor, glorot_uniform, log_softmax, sigmoid


@dataclass
class DecoderParams:
    gates: Tensor  # (M + H + D) x 4H
    gates_bias: Tensor  # 4H
    embedding: Tensor  # |L| x M
    l_0: Tensor  # M x |L|
    output_bias: Tensor  # |L|
    l_h: Tensor  # H x M
    l_z: Tensor  # D x M
    init_h: Tensor  # D x H
    init_h_bias: Tensor
    init_c: Tensor  # D x H
    init_c_bias: Tensor

    @staticmethod
    def view(params: Dict[str, Tensor]) -> "DecoderParams":
        return DecoderParams(
            gates=params["decoder.weight"],
            gates_bias=params["decoder.bias"],
            embedding=params["embedding.weight"],
            l_0=params["output.l0"],
            output_bias=params["output.bias"],
            l_h=params["output.l_h"],
            l_z=params["output.l_z"],
            init_h=params["init.h_weight"],
            init_h_bias=params["init.h_bias"],
            init_c=params["init.c_weight"],
            init_c_bias=params["init.c_bias"],
        )

    @property
    def hidden_size(self) -> int:
        return self.gates.shape[1] // 4

    @property
    def embedding_size(self) -> int:
        return self.embedding.shape[1]

    @property
    def vocabulary_size(self) -> int:
        return self.embedding.shape[0]


@dataclass
class DecoderState:
    h: Tensor
    c: Tensor
    y_prev: Tensor  # one-hot, distribution, or zeros before the first step
    step: int = 0


@dataclass
class LstmCache:
    embedded: Tensor
    joined: Tensor
    i: Tensor
    f: Tensor
    o: Tensor
    g: Tensor
    c_prev: Tensor
    tanh_c: Tensor


@dataclass
class OutputCache:
    embedded: Tensor
    h: Tensor
    z: Tensor
    combined: Tensor
    probs: Tensor


@dataclass
class InitCache:
    mean: Tensor
    h0: Tensor
    c0: Tensor


def init_decoder(
    feature_size: int, hidden_size: int, embedding_size: int, vocabulary_size: int, rng: np.random.Generator
) -> Dict[str, Tensor]:
    d, h, m, v = feature_size, hidden_size, embedding_size, vocabulary_size
    params = {
        "decoder.weight": glorot_uniform(rng, (m + h + d, 4 * h), m + h + d, 4 * h),
        "decoder.bias": np.zeros(4 * h),
        "embedding.weight": glorot_uniform(rng, (v, m), v, m),
        "output.l0": glorot_uniform(rng, (m, v), m, v),
        "output.bias": np.zeros(v),
        "output.l_h": glorot_uniform(rng, (h, m), h, m),
        "output.l_z": glorot_uniform(rng, (d, m), d, m),
        "init.h_weight": glorot_uniform(rng, (d, h), d, h),
        "init.h_bias": np.zeros(h),
        "init.c_weight": glorot_uniform(rng, (d, h), d, h),
        "init.c_bias": np.zeros(h),
    }
    return params


def initial_state(mean_feature: Tensor, params: DecoderParams) -> Tuple[DecoderState, InitCache]:
    if mean_feature.shape != (params.init_h.shape[0],):
        raise ShapeError(
            f"mean feature of shape {mean_feature.shape} does not match init map {params.init_h.shape}"
        )
    h0 = np.tanh(mean_feature @ params.init_h + params.init_h_bias)
    c0 = np.tanh(mean_feature @ params.init_c + params.init_c_bias)
    state = DecoderState(h0, c0, np.zeros(params.vocabulary_size))
    return state, InitCache(mean_feature, h0, c0)


def init_backward(
    cache: InitCache, grad_h0: Tensor, grad_c0: Tensor, params: DecoderParams
) -> Tuple[Dict[str, Tensor], Tensor]:
    grad_pre_h = grad_h0 * (1.0 - cache.h0 ** 2)
    grad_pre_c = grad_c0 * (1.0 - cache.c0 ** 2)
    grads = {
        "init.h_weight": np.outer(cache.mean, grad_pre_h),
        "init.h_bias": grad_pre_h,
        "init.c_weight": np.outer(cache.mean, grad_pre_c),
        "init.c_bias": grad_pre_c,
    }
    return grads, params.init_h @ grad_pre_h + params.init_c @ grad_pre_c


def lstm_step(state: DecoderState, z: Tensor, params: DecoderParams) -> Tuple[DecoderState, LstmCache]:
    hidden = params.hidden_size
    if state.h.shape != (hidden,) or state.c.shape != (hidden,):
        raise ShapeError(
            f"state of shapes {state.h.shape}/{state.c.shape} does not match hidden size {hidden}"
        )
    if state.y_prev.shape != (params.vocabulary_size,):
        raise ShapeError(
            f"previous output of shape {state.y_prev.shape} does not match {params.vocabulary_size} symbols"
        )
    embedded = state.y_prev @ params.embedding
    joined = np.concatenate([embedded, state.h, z])
    if joined.shape[0] != params.gates.shape[0]:
        raise ShapeError(
            f"gate input of size {joined.shape[0]} does not match gate matrix {params.gates.shape}"
        )

    pre = joined @ params.gates + params.gates_bias
    i = sigmoid(pre[:hidden])
    f = sigmoid(pre[hidden: 2 * hidden])
    o = sigmoid(pre[2 * hidden: 3 * hidden])
    g = np.tanh(pre[3 * hidden:])
    c = f * state.c + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    new_state = DecoderState(h, c, state.y_prev, state.step + 1)
    return new_state, LstmCache(embedded, joined, i, f, o, g, state.c, tanh_c)


def lstm_backward(
    cache: LstmCache, grad_h: Tensor, grad_c: Tensor, params: DecoderParams
) -> Tuple[Dict[str, Tensor], Tensor, Tensor, Tensor, Tensor]:
    """
    Backpropagate through one LSTM step.

    ``grad_c`` is the gradient arriving from the next step's cell. Returns
    (parameter gradients, embedded-input gradient, h_prev gradient,
    c_prev gradient, context gradient).
    """
    hidden = params.hidden_size
    m = params.embedding_size

    grad_c = grad_c + grad_h * cache.o * (1.0 - cache.tanh_c ** 2)
    grad_pre = np.concatenate(
        [
            grad_c * cache.g * cache.i * (1.0 - cache.i),
            grad_c * cache.c_prev * cache.f * (1.0 - cache.f),
            grad_h * cache.tanh_c * cache.o * (1.0 - cache.o),
            grad_c * cache.i * (1.0 - cache.g ** 2),
        ]
    )
    grads = {"decoder.weight": np.outer(cache.joined, grad_pre), "decoder.bias": grad_pre}
    grad_joined = params.gates @ grad_pre
    grad_embedded = grad_joined[:m]
    grad_h_prev = grad_joined[m: m + hidden]
    grad_z = grad_joined[m + hidden:]
    return grads, grad_embedded, grad_h_prev, grad_c * cache.f, grad_z


def output_distribution(
    y_prev: Tensor, h: Tensor, z: Tensor, params: DecoderParams
) -> Tuple[Tensor, Tensor, OutputCache]:
    """
    Returns (probabilities, log-probabilities, cache) over the alphabet.
    """
    if h.shape != (params.l_h.shape[0],) or z.shape != (params.l_z.shape[0],):
        raise ShapeError(
            f"h {h.shape} / z {z.shape} do not match L_h {params.l_h.shape} / L_z {params.l_z.shape}"
        )
    embedded = y_prev @ params.embedding
    combined = embedded + h @ params.l_h + z @ params.l_z
    log_probs = log_softmax(combined @ params.l_0 + params.output_bias)
    probs = np.exp(log_probs)
    return probs, log_probs, OutputCache(embedded, h, z, combined, probs)


def output_backward(
    cache: OutputCache, grad_logits: Tensor, params: DecoderParams
) -> Tuple[Dict[str, Tensor], Tensor, Tensor, Tensor]:
    """
    Returns (parameter gradients, embedded-input gradient, h gradient, z gradient).
    """
    grad_combined = params.l_0 @ grad_logits
    grads = {
        "output.l0": np.outer(cache.combined, grad_logits),
        "output.bias": grad_logits,
        "output.l_h": np.outer(cache.h, grad_combined),
        "output.l_z": np.outer(cache.z, grad_combined),
    }
    return grads, grad_combined, params.l_h @ grad_combined, params.l_z @ grad_combined
