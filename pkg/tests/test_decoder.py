import pytest

import numpy as np

from glyphread.errors import ShapeError
from glyphread.model.decoder import (
    DecoderParams,
    DecoderState,
    init_backward,
    init_decoder,
    initial_state,
    lstm_backward,
    lstm_step,
    output_backward,
    output_distribution,
)
from glyphread.model.tensor import finite_diff_grad

D, H, M, V = 5, 4, 3, 6


@pytest.fixture
def params():
    rng = np.random.default_rng(0)
    result = init_decoder(D, H, M, V, rng)
    for name in ("decoder.bias", "output.bias", "init.h_bias", "init.c_bias"):
        result[name] = rng.normal(0.0, 0.1, size=result[name].shape)
    return result


@pytest.fixture
def state():
    rng = np.random.default_rng(1)
    return DecoderState(rng.normal(size=H), rng.normal(size=H), np.eye(V)[2], step=3)


def test_init_shapes_and_zero_biases():
    params = init_decoder(D, H, M, V, np.random.default_rng(0))
    assert params["decoder.weight"].shape == (M + H + D, 4 * H)
    assert params["embedding.weight"].shape == (V, M)
    assert params["output.l0"].shape == (M, V)
    assert all(not params[name].any() for name in params if "bias" in name)


def test_lstm_step_advances_the_step(params, state):
    new_state, _ = lstm_step(state, np.ones(D), DecoderParams.view(params))
    assert new_state.step == 4
    assert new_state.h.shape == (H,)
    assert np.all(np.abs(new_state.h) < 1)


def test_output_is_a_distribution(params, state):
    probs, log_probs, _ = output_distribution(state.y_prev, state.h, np.ones(D), DecoderParams.view(params))
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs > 0)
    assert np.allclose(np.exp(log_probs), probs)


def test_first_step_has_no_previous_symbol(params):
    state, _ = initial_state(np.ones(D), DecoderParams.view(params))
    assert not state.y_prev.any()
    assert state.step == 0


def test_shape_errors(params, state):
    view = DecoderParams.view(params)
    with pytest.raises(ShapeError):
        lstm_step(state, np.ones(D + 1), view)
    with pytest.raises(ShapeError):
        lstm_step(DecoderState(np.ones(H + 1), state.c, state.y_prev), np.ones(D), view)
    with pytest.raises(ShapeError):
        initial_state(np.ones(D + 2), view)


def test_lstm_backward_matches_finite_differences(params, state):
    view = DecoderParams.view(params)
    z = np.random.default_rng(2).normal(size=D)
    up_h, up_c = np.random.default_rng(3).normal(size=(2, H))

    def loss(_=None) -> float:
        new_state, _ = lstm_step(state, z, view)
        return float(new_state.h @ up_h + new_state.c @ up_c)

    _, cache = lstm_step(state, z, view)
    grads, grad_embedded, grad_h, grad_c, grad_z = lstm_backward(cache, up_h, up_c, view)
    for name in ("decoder.weight", "decoder.bias"):
        assert np.allclose(grads[name], finite_diff_grad(loss, params[name]), atol=1e-8), name
    assert np.allclose(grad_h, finite_diff_grad(loss, state.h), atol=1e-8)
    assert np.allclose(grad_c, finite_diff_grad(loss, state.c), atol=1e-8)
    assert np.allclose(grad_z, finite_diff_grad(loss, z), atol=1e-8)
    assert np.allclose(
        np.outer(state.y_prev, grad_embedded), finite_diff_grad(loss, params["embedding.weight"]), atol=1e-8
    )


def test_output_backward_matches_finite_differences(params, state):
    view = DecoderParams.view(params)
    z = np.random.default_rng(4).normal(size=D)
    target = 1

    def loss(_=None) -> float:
        _, log_probs, _ = output_distribution(state.y_prev, state.h, z, view)
        return float(-log_probs[target])

    probs, _, cache = output_distribution(state.y_prev, state.h, z, view)
    grad_logits = probs.copy()
    grad_logits[target] -= 1.0
    grads, grad_embedded, grad_h, grad_z = output_backward(cache, grad_logits, view)
    for name in ("output.l0", "output.bias", "output.l_h", "output.l_z"):
        assert np.allclose(grads[name], finite_diff_grad(loss, params[name]), atol=1e-8), name
    assert np.allclose(grad_h, finite_diff_grad(loss, state.h), atol=1e-8)
    assert np.allclose(grad_z, finite_diff_grad(loss, z), atol=1e-8)
    assert np.allclose(
        np.outer(state.y_prev, grad_embedded), finite_diff_grad(loss, params["embedding.weight"]), atol=1e-8
    )


def test_init_backward_matches_finite_differences(params):
    view = DecoderParams.view(params)
    mean = np.random.default_rng(5).normal(size=D)
    up_h, up_c = np.random.default_rng(6).normal(size=(2, H))

    def loss(_=None) -> float:
        state, _ = initial_state(mean, view)
        return float(state.h @ up_h + state.c @ up_c)

    _, cache = initial_state(mean, view)
    grads, grad_mean = init_backward(cache, up_h, up_c, view)
    for name in ("init.h_weight", "init.h_bias", "init.c_weight", "init.c_bias"):
        assert np.allclose(grads[name], finite_diff_grad(loss, params[name]), atol=1e-8), name
    assert np.allclose(grad_mean, finite_diff_grad(loss, mean), atol=1e-8)


def zero_params(hidden: int = H, vocabulary: int = V):
    params = init_decoder(D, hidden, M, vocabulary, np.random.default_rng(0))
    return DecoderParams.view({name: np.zeros_like(value) for name, value in params.items()})


def test_lstm_step_with_zero_parameters():
    state = DecoderState(np.zeros(1), np.array([2.0]), np.zeros(V))
    new_state, _ = lstm_step(state, np.zeros(D), zero_params(hidden=1))
    # every gate sits at sigmoid(0) = 0.5 and the candidate at tanh(0) = 0
    assert new_state.c.tolist() == [1.0]
    assert new_state.h[0] == pytest.approx(0.5 * np.tanh(1.0), abs=1e-15)


def test_zero_output_layer_is_uniform():
    view = zero_params(vocabulary=37)
    probs, log_probs, _ = output_distribution(np.zeros(37), np.zeros(H), np.zeros(D), view)
    assert np.allclose(probs, 1 / 37, rtol=0, atol=1e-15)
    assert np.allclose(log_probs, -np.log(37), rtol=0, atol=1e-12)


def test_single_logit_offset():
    view = zero_params(vocabulary=37)
    view.output_bias[0] = np.log(36.0)
    probs, _, _ = output_distribution(np.zeros(37), np.zeros(H), np.zeros(D), view)
    assert probs[0] == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(probs[1:], 1 / 72, rtol=0, atol=1e-12)
