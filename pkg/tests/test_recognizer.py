import pytest

import numpy as np

from glyphread.errors import InputError, ShapeError
from glyphread.model.attention import AttentionParams, attend
from glyphread.model.decoder import DecoderParams, lstm_step, output_distribution
from glyphread.model.recognizer import (
    GROUPS,
    ModelConfig,
    Recognizer,
    group_parameters,
    parameter_shapes,
)
from test_utils import random_image, toy_model, toy_model_config


def test_every_group_is_initialized():
    model = toy_model()
    groups = group_parameters(list(model.params))
    assert set(groups) == set(GROUPS)
    assert all(not model.params[name].any() for name in model.params if "bias" in name)


def test_same_seed_same_parameters():
    a, b = toy_model(seed=5), toy_model(seed=5)
    assert all(np.array_equal(a.params[name], b.params[name]) for name in a.params)
    c = toy_model(seed=6)
    assert not np.array_equal(a.params["decoder.weight"], c.params["decoder.weight"])


def test_wrong_parameter_shape_is_rejected():
    model = toy_model()
    params = dict(model.params)
    params["output.l0"] = np.zeros((3, 3))
    with pytest.raises(ShapeError, match="output.l0"):
        Recognizer(model.config, params)


def test_missing_parameter_is_rejected():
    model = toy_model()
    params = dict(model.params)
    del params["attention.w_a"]
    with pytest.raises(ShapeError, match="missing"):
        Recognizer(model.config, params)


def test_parameter_shapes_match_created_model():
    model = toy_model()
    assert {name: value.shape for name, value in model.params.items()} == parameter_shapes(model.config)


def test_config_dict_round_trip():
    config = toy_model_config(symbols="abc", attention=False)
    assert ModelConfig.from_dict(config.to_dict()) == config


@pytest.mark.parametrize("attention", [True, False])
def test_loss_agrees_with_forward_backward(attention):
    model = toy_model(attention=attention)
    image = random_image(1)
    loss, grads = model.forward_backward(image, "ab")
    assert loss == pytest.approx(model.loss(image, "ab"), rel=1e-12)
    assert set(grads) == set(model.params)
    assert loss > 0


def test_decode_step_distribution():
    model = toy_model()
    features = model.encode(random_image(2))
    result = model.decode_step(features, model.initial_state(features))
    assert result.probs.sum() == pytest.approx(1.0)
    assert result.attention is not None
    assert result.attention.weights.shape == (features.size,)
    assert result.state.step == 1


def test_baseline_context_only_at_first_step():
    model = toy_model(attention=False)
    features = model.encode(random_image(3))
    state = model.initial_state(features)
    _, first = model._context(features, state)
    assert np.allclose(first, features.mean())
    state = model.feed(model.decode_step(features, state).state, 0)
    _, later = model._context(features, state)
    assert not later.any()


def test_greedy_decode_respects_cap():
    model = toy_model()
    word = model.greedy_decode(random_image(4), max_length=3)
    assert len(word) <= 3
    assert all(c in model.alphabet for c in word)


def test_attention_trace_has_one_map_per_symbol():
    model = toy_model()
    features, trace = model.attention_trace(random_image(5), "abc")
    assert [symbol for symbol, _ in trace] == ["a", "b", "c", model.alphabet.symbol(model.alphabet.end)]
    assert all(weights.shape == (features.size,) for _, weights in trace)
    assert all(weights.sum() == pytest.approx(1.0) for _, weights in trace)


def test_unknown_character_in_target():
    with pytest.raises(InputError, match="'A'"):
        toy_model().forward_backward(random_image(), "aA")


def test_zero_parameters_give_uniform_loss():
    model = toy_model()
    zeroed = Recognizer(model.config, {name: np.zeros_like(value) for name, value in model.params.items()})
    assert len(zeroed.alphabet) == 37
    assert zeroed.loss(random_image(6), "abc") == pytest.approx(4 * np.log(37), abs=1e-12)


def test_decode_step_chains_attention_lstm_and_output():
    model = toy_model(seed=4)
    features = model.encode(random_image(7))
    state = model.feed(model.decode_step(features, model.initial_state(features)).state, 2)
    result = model.decode_step(features, state)

    decoder = DecoderParams.view(model.params)
    attention, _ = attend(features, state.h, AttentionParams.view(model.params))
    new_state, _ = lstm_step(state, attention.context, decoder)
    probs, log_probs, _ = output_distribution(state.y_prev, new_state.h, attention.context, decoder)

    assert np.array_equal(result.attention.weights, attention.weights)
    assert np.array_equal(result.state.h, new_state.h)
    assert np.array_equal(result.state.c, new_state.c)
    assert np.array_equal(result.probs, probs)
    assert np.array_equal(result.log_probs, log_probs)


def test_attention_trace_without_end():
    model = toy_model()
    _, trace = model.attention_trace(random_image(5), "ab", end=False)
    assert [symbol for symbol, _ in trace] == ["a", "b"]
