"""
Convolutional encoder turning a grayscale word image into a grid of feature
vectors, one per spatial cell, flattened row-major.

Layers are 3x3 valid convolutions with a per-axis stride, ReLU, and an
optional non-overlapping max-pool.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from glyphread.errors import ShapeError
from glyphread.model.tensor import Tensor, glorot_uniform

KERNEL = 3
Pair = Tuple[int, int]


@dataclass(frozen=True)
class ConvSpec:
    out_channels: int
    stride: Pair = (1, 1)
    pool: Pair = (1, 1)


@dataclass(frozen=True)
class EncoderConfig:
    layers: Tuple[ConvSpec, ...] = (
        ConvSpec(16, (1, 1), (2, 2)),
        ConvSpec(32, (1, 2), (2, 2)),
        ConvSpec(64, (1, 1), (1, 1)),
    )
    input_height: int = 32
    center: bool = True

    def __post_init__(self) -> None:
        if len(self.layers) < 1:
            raise ShapeError("encoder needs at least one convolutional layer")
        if self.feature_size < 8:
            raise ShapeError(f"final channel count must be at least 8, got {self.feature_size}")
        if self.grid_rows < 1:
            raise ShapeError(
                f"input height {self.input_height} leaves no grid rows after all layers"
            )

    @property
    def feature_size(self) -> int:
        return self.layers[-1].out_channels

    @property
    def grid_rows(self) -> int:
        return self.output_size(self.input_height, axis=0)

    def output_size(self, size: int, axis: int) -> int:
        for spec in self.layers:
            size = (size - KERNEL) // spec.stride[axis] + 1 if size >= KERNEL else 0
            size = size // spec.pool[axis]
        return size

    def grid_shape(self, width: int) -> Pair:
        return self.grid_rows, self.output_size(width, axis=1)

    def min_width(self) -> int:
        width = KERNEL
        while self.output_size(width, axis=1) < 1:
            width += 1
        return width


@dataclass
class FeatureGrid:
    vectors: Tensor  # K x D, row-major over the R x C grid
    rows: int
    cols: int
    centers: List[Tuple[float, float]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def mean(self) -> Tensor:
        return self.vectors.mean(axis=0)


@dataclass
class LayerCache:
    inputs: Tensor
    windows: Tensor
    pre: Tensor
    activated: Tensor
    pool_index: Optional[Tensor]


@dataclass
class EncoderCache:
    image_shape: Pair
    layers: List[LayerCache]
    grid_shape: Tuple[int, int, int]


def layer_names(index: int) -> Tuple[str, str]:
    return f"encoder.conv{index}.weight", f"encoder.conv{index}.bias"


def init_encoder(config: EncoderConfig, rng: np.random.Generator) -> Dict[str, Tensor]:
    params = {}
    in_channels = 1
    for i, spec in enumerate(config.layers):
        weight_name, bias_name = layer_names(i)
        shape = (spec.out_channels, in_channels, KERNEL, KERNEL)
        params[weight_name] = glorot_uniform(
            rng, shape, in_channels * KERNEL * KERNEL, spec.out_channels * KERNEL * KERNEL
        )
        params[bias_name] = np.zeros(spec.out_channels)
        in_channels = spec.out_channels
    return params


def receptive_field_centers(config: EncoderConfig, rows: int, cols: int) -> List[Tuple[float, float]]:
    def to_input(position: float, axis: int) -> float:
        for spec in reversed(config.layers):
            pool = spec.pool[axis]
            position = position * pool + (pool - 1) / 2
            position = position * spec.stride[axis] + (KERNEL - 1) / 2
        return position

    return [(to_input(r, 0), to_input(c, 1)) for r in range(rows) for c in range(cols)]


def _conv_forward(x: Tensor, weight: Tensor, bias: Tensor, stride: Pair) -> Tuple[Tensor, Tensor]:
    windows = sliding_window_view(x, (KERNEL, KERNEL), axis=(1, 2))[:, :: stride[0], :: stride[1]]
    out = np.tensordot(weight, windows, axes=([1, 2, 3], [0, 3, 4]))
    return out + bias[:, None, None], windows


def _conv_backward(
    grad_out: Tensor, windows: Tensor, weight: Tensor, input_shape: Tuple[int, ...], stride: Pair
) -> Tuple[Tensor, Tensor, Tensor]:
    grad_weight = np.tensordot(grad_out, windows, axes=([1, 2], [1, 2]))
    grad_bias = grad_out.sum(axis=(1, 2))
    grad_windows = np.tensordot(weight, grad_out, axes=([0], [0]))  # C_in x 3 x 3 x Ho x Wo
    grad_input = np.zeros(input_shape)
    out_h, out_w = grad_out.shape[1:]
    for k in range(KERNEL):
        rows = slice(k, k + stride[0] * (out_h - 1) + 1, stride[0])
        for l in range(KERNEL):
            cols = slice(l, l + stride[1] * (out_w - 1) + 1, stride[1])
            grad_input[:, rows, cols] += grad_windows[:, k, l]
    return grad_weight, grad_bias, grad_input


def _pool_forward(x: Tensor, pool: Pair) -> Tuple[Tensor, Tensor]:
    channels, height, width = x.shape
    ph, pw = pool
    out_h, out_w = height // ph, width // pw
    blocks = (
        x[:, : out_h * ph, : out_w * pw]
        .reshape(channels, out_h, ph, out_w, pw)
        .transpose(0, 1, 3, 2, 4)
        .reshape(channels, out_h, out_w, ph * pw)
    )
    index = blocks.argmax(axis=-1)
    return np.take_along_axis(blocks, index[..., None], axis=-1)[..., 0], index


def _pool_backward(grad_out: Tensor, index: Tensor, input_shape: Tuple[int, ...], pool: Pair) -> Tensor:
    channels, height, width = input_shape
    ph, pw = pool
    out_h, out_w = grad_out.shape[1:]
    blocks = np.zeros((channels, out_h, out_w, ph * pw))
    np.put_along_axis(blocks, index[..., None], grad_out[..., None], axis=-1)
    grad_input = np.zeros(input_shape)
    grad_input[:, : out_h * ph, : out_w * pw] = (
        blocks.reshape(channels, out_h, out_w, ph, pw)
        .transpose(0, 1, 3, 2, 4)
        .reshape(channels, out_h * ph, out_w * pw)
    )
    return grad_input


def encode(
    image: Tensor, params: Dict[str, Tensor], config: EncoderConfig
) -> Tuple[FeatureGrid, EncoderCache]:
    """
    Map an ``input_height`` x W image with values in [0, 1] to its feature grid.

    Returns the grid and the intermediates ``encoder_backward`` needs.
    """
    if image.ndim != 2 or image.shape[0] != config.input_height:
        raise ShapeError(
            f"image of shape {image.shape} does not have height {config.input_height}"
        )
    min_width = config.min_width()
    if image.shape[1] < min_width:
        raise ShapeError(f"image width {image.shape[1]} is below the minimum width {min_width}")

    x = np.asarray(image, dtype=np.float64)
    if config.center:
        x = x - x.mean()
    x = x[None, :, :]

    caches = []
    for i, spec in enumerate(config.layers):
        weight_name, bias_name = layer_names(i)
        pre, windows = _conv_forward(x, params[weight_name], params[bias_name], spec.stride)
        activated = np.maximum(pre, 0.0)
        pool_index = None
        out = activated
        if spec.pool != (1, 1):
            out, pool_index = _pool_forward(activated, spec.pool)
        caches.append(LayerCache(x, windows, pre, activated, pool_index))
        x = out

    depth, rows, cols = x.shape
    vectors = x.transpose(1, 2, 0).reshape(rows * cols, depth)
    grid = FeatureGrid(vectors, rows, cols, receptive_field_centers(config, rows, cols))
    return grid, EncoderCache(image.shape, caches, (depth, rows, cols))


def encoder_backward(
    cache: EncoderCache, grad_out: Tensor, params: Dict[str, Tensor], config: EncoderConfig
) -> Tuple[Dict[str, Tensor], Tensor]:
    """
    Gradients of every encoder weight and of the input image, given the
    gradient of the loss with respect to the K x D feature vectors.
    """
    depth, rows, cols = cache.grid_shape
    if grad_out.shape != (rows * cols, depth):
        raise ShapeError(
            f"feature gradient has shape {grad_out.shape}, expected {(rows * cols, depth)}"
        )

    grads = {}
    grad = grad_out.reshape(rows, cols, depth).transpose(2, 0, 1)
    for i in reversed(range(len(config.layers))):
        spec = config.layers[i]
        layer = cache.layers[i]
        weight_name, bias_name = layer_names(i)
        if layer.pool_index is not None:
            grad = _pool_backward(grad, layer.pool_index, layer.activated.shape, spec.pool)
        grad = grad * (layer.pre > 0)
        grads[weight_name], grads[bias_name], grad = _conv_backward(
            grad, layer.windows, params[weight_name], layer.inputs.shape, spec.stride
        )

    grad_image = grad[0]
    if config.center:
        grad_image = grad_image - grad_image.mean()
    return grads, grad_image
