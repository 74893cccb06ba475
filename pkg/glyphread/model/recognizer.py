"""
The full recognizer: encoder, soft attention and LSTM decoder over one named
parameter dictionary.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from glyphread.alphabet import DEFAULT_SYMBOLS, Alphabet
from glyphread.errors import ShapeError
from glyphread.model.attention import (
    AttentionParams,
    AttentionStep,
    attend,
    attention_backward,
    init_attention,
)
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
from glyphread.model.encoder import (
    ConvSpec,
    EncoderConfig,
    FeatureGrid,
    encode,
    encoder_backward,
    init_encoder,
)
from glyphread.model.tensor import Tensor

Params = Dict[str, Tensor]
GROUPS = ("encoder", "attention", "decoder", "embedding", "output", "init")


@dataclass(frozen=True)
class ModelConfig:
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    hidden_size: int = 256
    embedding_size: int = 128
    attention_size: int = 64
    symbols: str = DEFAULT_SYMBOLS
    attention: bool = True
    max_length: int = 32

    def __post_init__(self) -> None:
        for name in ("hidden_size", "embedding_size", "attention_size", "max_length"):
            if getattr(self, name) < 1:
                raise ShapeError(f"{name} must be at least 1, got {getattr(self, name)}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "encoder": {
                "layers": [
                    {"out_channels": s.out_channels, "stride": list(s.stride), "pool": list(s.pool)}
                    for s in self.encoder.layers
                ],
                "input_height": self.encoder.input_height,
                "center": self.encoder.center,
            },
            "hidden_size": self.hidden_size,
            "embedding_size": self.embedding_size,
            "attention_size": self.attention_size,
            "symbols": self.symbols,
            "attention": self.attention,
            "max_length": self.max_length,
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> "ModelConfig":
        encoder = data["encoder"]
        layers = tuple(
            ConvSpec(layer["out_channels"], tuple(layer["stride"]), tuple(layer["pool"]))
            for layer in encoder["layers"]
        )
        return ModelConfig(
            encoder=EncoderConfig(layers, encoder["input_height"], encoder["center"]),
            hidden_size=data["hidden_size"],
            embedding_size=data["embedding_size"],
            attention_size=data["attention_size"],
            symbols=data["symbols"],
            attention=data["attention"],
            max_length=data["max_length"],
        )


def group_of(name: str) -> str:
    return name.split(".", 1)[0]


def parameter_shapes(config: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    shapes: Dict[str, Tuple[int, ...]] = {}
    in_channels = 1
    for i, spec in enumerate(config.encoder.layers):
        shapes[f"encoder.conv{i}.weight"] = (spec.out_channels, in_channels, 3, 3)
        shapes[f"encoder.conv{i}.bias"] = (spec.out_channels,)
        in_channels = spec.out_channels

    d, h, m, a = config.encoder.feature_size, config.hidden_size, config.embedding_size, config.attention_size
    v = len(config.symbols) + 1
    shapes.update({
        "attention.w_x": (d, a),
        "attention.w_h": (h, a),
        "attention.bias": (a,),
        "attention.w_a": (a,),
        "decoder.weight": (m + h + d, 4 * h),
        "decoder.bias": (4 * h,),
        "embedding.weight": (v, m),
        "output.l0": (m, v),
        "output.bias": (v,),
        "output.l_h": (h, m),
        "output.l_z": (d, m),
        "init.h_weight": (d, h),
        "init.h_bias": (h,),
        "init.c_weight": (d, h),
        "init.c_bias": (h,),
    })
    return shapes


@dataclass
class StepResult:
    attention: Optional[AttentionStep]
    state: DecoderState
    probs: Tensor
    log_probs: Tensor


class Recognizer:
    def __init__(self, config: ModelConfig, params: Params) -> None:
        self.config = config
        self.alphabet = Alphabet(config.symbols)
        self.params = params
        self._check_params()

    @staticmethod
    def create(config: ModelConfig, seed: int = 0) -> "Recognizer":
        rng = np.random.default_rng(seed)
        alphabet = Alphabet(config.symbols)
        d = config.encoder.feature_size
        params = init_encoder(config.encoder, rng)
        params.update(init_attention(d, config.hidden_size, config.attention_size, rng))
        params.update(init_decoder(d, config.hidden_size, config.embedding_size, len(alphabet), rng))
        return Recognizer(config, params)

    def _check_params(self) -> None:
        expected = parameter_shapes(self.config)
        missing = sorted(set(expected) - set(self.params))
        if missing:
            raise ShapeError(f"missing parameters: {', '.join(missing)}")
        unknown = sorted(set(self.params) - set(expected))
        if unknown:
            raise ShapeError(f"unknown parameters: {', '.join(unknown)}")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeError(
                    f"parameter {name} has shape {self.params[name].shape}, expected {shape}"
                )

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.params.values())

    def encode(self, image: Tensor) -> FeatureGrid:
        grid, _ = encode(image, self.params, self.config.encoder)
        return grid

    def initial_state(self, features: FeatureGrid) -> DecoderState:
        state, _ = initial_state(features.mean(), DecoderParams.view(self.params))
        return state

    def _context(self, features: FeatureGrid, state: DecoderState) -> Tuple[Optional[AttentionStep], Tensor]:
        if self.config.attention:
            attention, _ = attend(features, state.h, AttentionParams.view(self.params))
            return attention, attention.context
        # baseline: the image is seen only at the first step
        if state.step == 0:
            return None, features.mean()
        return None, np.zeros(features.dim)

    def decode_step(self, features: FeatureGrid, state: DecoderState) -> StepResult:
        decoder = DecoderParams.view(self.params)
        attention, z = self._context(features, state)
        new_state, _ = lstm_step(state, z, decoder)
        probs, log_probs, _ = output_distribution(state.y_prev, new_state.h, z, decoder)
        return StepResult(attention, new_state, probs, log_probs)

    def feed(self, state: DecoderState, symbol: int) -> DecoderState:
        return DecoderState(state.h, state.c, self.alphabet.one_hot(symbol), state.step)

    def forward_backward(self, image: Tensor, target: str) -> Tuple[float, Params]:
        """
        Teacher-forced cross-entropy of ``target`` followed by END, and its
        gradient with respect to every parameter.
        """
        symbols = self.alphabet.encode(target) + [self.alphabet.end]
        decoder = DecoderParams.view(self.params)
        attention_params = AttentionParams.view(self.params)

        grid, encoder_cache = encode(image, self.params, self.config.encoder)
        state, init_cache = initial_state(grid.mean(), decoder)

        loss = 0.0
        steps = []
        for t, symbol in enumerate(symbols):
            attention_cache = None
            if self.config.attention:
                attention, attention_cache = attend(grid, state.h, attention_params)
                z = attention.context
            else:
                z = grid.mean() if t == 0 else np.zeros(grid.dim)
            y_prev = state.y_prev
            state, lstm_cache = lstm_step(state, z, decoder)
            probs, log_probs, output_cache = output_distribution(y_prev, state.h, z, decoder)
            loss -= log_probs[symbol]
            steps.append((symbol, y_prev, attention_cache, lstm_cache, output_cache, probs))
            state = self.feed(state, symbol)

        grads = {name: np.zeros_like(value) for name, value in self.params.items()}
        grad_features = np.zeros_like(grid.vectors)
        grad_h = np.zeros(self.config.hidden_size)
        grad_c = np.zeros(self.config.hidden_size)

        for t in reversed(range(len(steps))):
            symbol, y_prev, attention_cache, lstm_cache, output_cache, probs = steps[t]
            grad_logits = probs.copy()
            grad_logits[symbol] -= 1.0

            out_grads, grad_emb_out, grad_h_out, grad_z_out = output_backward(
                output_cache, grad_logits, decoder
            )
            lstm_grads, grad_emb_lstm, grad_h, grad_c, grad_z_lstm = lstm_backward(
                lstm_cache, grad_h + grad_h_out, grad_c, decoder
            )
            _accumulate(grads, out_grads)
            _accumulate(grads, lstm_grads)
            grads["embedding.weight"] += np.outer(y_prev, grad_emb_out + grad_emb_lstm)

            grad_z = grad_z_out + grad_z_lstm
            if attention_cache is not None:
                attention_grads, grad_x, grad_h_attention = attention_backward(
                    attention_cache, grad_z, attention_params
                )
                _accumulate(grads, attention_grads)
                grad_features += grad_x
                grad_h = grad_h + grad_h_attention
            elif t == 0:
                grad_features += grad_z / grid.size

        init_grads, grad_mean = init_backward(init_cache, grad_h, grad_c, decoder)
        _accumulate(grads, init_grads)
        grad_features += grad_mean / grid.size

        encoder_grads, _ = encoder_backward(encoder_cache, grad_features, self.params, self.config.encoder)
        _accumulate(grads, encoder_grads)
        return float(loss), grads

    def loss(self, image: Tensor, target: str) -> float:
        symbols = self.alphabet.encode(target) + [self.alphabet.end]
        features = self.encode(image)
        state = self.initial_state(features)
        total = 0.0
        for symbol in symbols:
            result = self.decode_step(features, state)
            total -= result.log_probs[symbol]
            state = self.feed(result.state, symbol)
        return float(total)

    def greedy_decode(self, image: Tensor, max_length: Optional[int] = None) -> str:
        max_length = max_length or self.config.max_length
        features = self.encode(image)
        state = self.initial_state(features)
        emitted: List[int] = []
        for _ in range(max_length):
            result = self.decode_step(features, state)
            symbol = int(np.argmax(result.log_probs))
            if symbol == self.alphabet.end:
                break
            emitted.append(symbol)
            state = self.feed(result.state, symbol)
        return self.alphabet.decode(emitted)

    def attention_trace(
        self, image: Tensor, word: str, end: bool = True
    ) -> Tuple[FeatureGrid, List[Tuple[str, Tensor]]]:
        """
        Attention weights while forcing ``word``, followed by END unless
        ``end`` is False: one (emitted symbol, K weights) pair per step.
        """
        features = self.encode(image)
        state = self.initial_state(features)
        symbols = self.alphabet.encode(word) + ([self.alphabet.end] if end else [])
        trace = []
        for symbol in symbols:
            result = self.decode_step(features, state)
            if result.attention is not None:
                weights = result.attention.weights
            else:
                weights = np.full(features.size, 1.0 / features.size if state.step == 0 else 0.0)
            trace.append((self.alphabet.symbol(symbol), weights))
            state = self.feed(result.state, symbol)
        return features, trace


def _accumulate(total: Params, grads: Params) -> None:
    for name, grad in grads.items():
        total[name] += grad


def group_parameters(names: Sequence[str]) -> Dict[str, List[str]]:
    groups: Dict[str, List[str]] = {}
    for name in names:
        groups.setdefault(group_of(name), []).append(name)
    return groups
