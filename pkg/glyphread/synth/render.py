"""
Render words from the built-in glyph set into noisy grayscale images.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from glyphread.errors import InputError, ShapeError
from glyphread.synth.glyphs import GLYPH_HEIGHT, GLYPH_WIDTH, GLYPHS

MAX_WORD_LENGTH = 20


@dataclass(frozen=True)
class RenderConfig:
    height: int = 32
    scale: int = 3
    margin: int = 6
    min_width: int = 32
    jitter: int = 1
    noise: float = 0.05
    foreground: Tuple[float, float] = (0.7, 1.0)
    background: Tuple[float, float] = (0.0, 0.3)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.noise < 0:
            raise ValueError(f"noise sigma must be non-negative, got {self.noise}")
        if self.scale < 1:
            raise ValueError(f"scale must be at least 1, got {self.scale}")
        if GLYPH_HEIGHT * self.scale > self.height:
            raise ShapeError(
                f"glyphs of height {GLYPH_HEIGHT * self.scale} do not fit into images of height {self.height}"
            )

    @property
    def advance(self) -> int:
        return (GLYPH_WIDTH + 1) * self.scale

    def width_for(self, length: int) -> int:
        glyphs = length * GLYPH_WIDTH * self.scale + max(length - 1, 0) * self.scale
        return max(2 * self.margin + glyphs, self.min_width)


def _paste(canvas: np.ndarray, glyph: np.ndarray, top: int, left: int) -> None:
    height, width = canvas.shape
    rows = slice(max(top, 0), min(top + glyph.shape[0], height))
    cols = slice(max(left, 0), min(left + glyph.shape[1], width))
    g_rows = slice(rows.start - top, rows.stop - top)
    g_cols = slice(cols.start - left, cols.stop - left)
    canvas[rows, cols] = np.maximum(canvas[rows, cols], glyph[g_rows, g_cols])


def render_word(word: str, config: RenderConfig, seed: Optional[int] = None) -> np.ndarray:
    """
    Render ``word`` with intensities, jitter and noise drawn from ``seed``
    (``config.seed`` when omitted). Values are clamped to [0, 1].
    """
    if len(word) > MAX_WORD_LENGTH:
        raise InputError(f"word '{word}' is longer than {MAX_WORD_LENGTH} characters")
    for char in word:
        if char not in GLYPHS:
            raise InputError(f"character '{char}' of word '{word}' has no glyph")

    rng = np.random.default_rng(config.seed if seed is None else seed)
    foreground = rng.uniform(*config.foreground)
    background = rng.uniform(*config.background)

    mask = np.zeros((config.height, config.width_for(len(word))))
    base_top = (config.height - GLYPH_HEIGHT * config.scale) // 2
    block = np.ones((config.scale, config.scale))
    for i, char in enumerate(word):
        glyph = np.kron(GLYPHS.bitmap(char), block)
        dy, dx = rng.integers(-config.jitter, config.jitter + 1, size=2) if config.jitter else (0, 0)
        _paste(mask, glyph, base_top + int(dy), config.margin + i * config.advance + int(dx))

    image = background + (foreground - background) * mask
    if config.noise > 0:
        image = image + rng.normal(0.0, config.noise, size=image.shape)
    return np.clip(image, 0.0, 1.0)
