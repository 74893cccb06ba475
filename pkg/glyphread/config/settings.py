"""
Typed settings for the numeric code, built from a resolved configuration.
"""

from typing import List, Optional, Sequence, Tuple

from glyphread.alphabet import Alphabet
from glyphread.config.config import ImmutableConfig
from glyphread.errors import InputError
from glyphread.inference.beamsearch import DecodeConfig
from glyphread.inference.lexicon import build_trie
from glyphread.inference.ngram import NgramModel, fit
from glyphread.model.encoder import ConvSpec, EncoderConfig
from glyphread.model.recognizer import ModelConfig
from glyphread.options import Option
from glyphread.synth.dataset import load_word_list, sample_corpus, usable_words
from glyphread.synth.render import RenderConfig
from glyphread.training.trainer import TrainConfig


def _range(config: ImmutableConfig, option: Option) -> Tuple[float, float]:
    val = config[option]
    if len(val) != 2 or not 0 <= val[0] <= val[1] <= 1:  # type: ignore
        raise InputError(f"{option.to_name()} must be two intensities lo,hi with 0 <= lo <= hi <= 1, got {val}")
    return float(val[0]), float(val[1])  # type: ignore


def encoder_config(config: ImmutableConfig) -> EncoderConfig:
    channels, strides, pools = config[Option.CONV_CHANNELS], config[Option.CONV_STRIDES], config[Option.CONV_POOLS]
    if not len(channels) == len(strides) == len(pools):  # type: ignore
        raise InputError(
            f"conv-channels, conv-strides and conv-pools differ in length: "
            f"{len(channels)}, {len(strides)}, {len(pools)}"  # type: ignore
        )
    layers = tuple(
        ConvSpec(int(c), tuple(s), tuple(p))  # type: ignore
        for c, s, p in zip(channels, strides, pools)  # type: ignore
    )
    return EncoderConfig(layers, int(config[Option.INPUT_HEIGHT]), bool(config[Option.CENTER_IMAGES]))  # type: ignore


def model_config(config: ImmutableConfig) -> ModelConfig:
    return ModelConfig(
        encoder=encoder_config(config),
        hidden_size=int(config[Option.HIDDEN_SIZE]),  # type: ignore
        embedding_size=int(config[Option.EMBEDDING_SIZE]),  # type: ignore
        attention_size=int(config[Option.ATTENTION_SIZE]),  # type: ignore
        symbols=str(config[Option.SYMBOLS]),
        attention=bool(config[Option.ATTENTION]),
        max_length=int(config[Option.MAX_LENGTH]),  # type: ignore
    )


def train_config(config: ImmutableConfig, jobs: int = 1) -> TrainConfig:
    try:
        return TrainConfig(
            learning_rate=float(config[Option.LEARNING_RATE]),  # type: ignore
            batch_size=int(config[Option.BATCH_SIZE]),  # type: ignore
            epochs=int(config[Option.EPOCHS]),  # type: ignore
            clip_norm=float(config[Option.CLIP_NORM]),  # type: ignore
            seed=int(config[Option.SEED]),  # type: ignore
            validation_fraction=float(config[Option.VALIDATION_FRACTION]),  # type: ignore
            jobs=jobs,
        )
    except ValueError as e:
        raise InputError(str(e)) from e


def render_config(config: ImmutableConfig) -> RenderConfig:
    try:
        return RenderConfig(
            height=int(config[Option.INPUT_HEIGHT]),  # type: ignore
            scale=int(config[Option.RENDER_SCALE]),  # type: ignore
            margin=int(config[Option.RENDER_MARGIN]),  # type: ignore
            min_width=encoder_config(config).min_width(),
            jitter=int(config[Option.RENDER_JITTER]),  # type: ignore
            noise=float(config[Option.RENDER_NOISE]),  # type: ignore
            foreground=_range(config, Option.FOREGROUND),
            background=_range(config, Option.BACKGROUND),
            seed=int(config[Option.SEED]),  # type: ignore
        )
    except ValueError as e:
        raise InputError(str(e)) from e


def fit_lm(config: ImmutableConfig, corpus: Sequence[str], symbols: Optional[str] = None) -> NgramModel:
    return fit(
        corpus,
        k_max=int(config[Option.LM_ORDER]),  # type: ignore
        delta=float(config[Option.LM_SMOOTHING]),  # type: ignore
        symbols=symbols if symbols is not None else str(config[Option.SYMBOLS]),
    )


def decode_config(
    config: ImmutableConfig,
    lm: Optional[NgramModel] = None,
    lexicon: Optional[Sequence[str]] = None,
    symbols: Optional[str] = None,
    top: Optional[int] = None,
) -> DecodeConfig:
    """
    Decoding settings; ``lexicon`` becomes a pruning trie or the word list
    for nearest-word snapping, depending on ``lexicon-mode``.
    """
    mode = str(config[Option.LEXICON_MODE])
    trie, words = None, None
    if lexicon is not None and mode == "prune":
        alphabet = Alphabet(symbols if symbols is not None else str(config[Option.SYMBOLS]))
        trie = build_trie(lexicon, alphabet)
    elif lexicon is not None:
        words = list(lexicon)
    return DecodeConfig(
        beam_width=int(config[Option.BEAM_WIDTH]),  # type: ignore
        alpha=float(config[Option.LM_WEIGHT]),  # type: ignore
        lm=lm,
        trie=trie,
        max_length=int(config[Option.MAX_LENGTH]),  # type: ignore
        lexicon_mode=mode,
        lexicon_words=words,
        lm_scores_end=bool(config[Option.LM_SCORES_END]),
        top=top,
    )


def corpus_words(config: ImmutableConfig, path: Optional[str] = None) -> List[str]:
    """
    ``corpus-size`` words sampled from the word list at ``path`` (the
    packaged list by default), restricted to the configured alphabet.
    """
    alphabet = Alphabet(str(config[Option.SYMBOLS]))
    words = load_word_list(path) if path is not None else load_word_list()
    words = usable_words(words, alphabet)
    if not words:
        raise InputError(f"no usable words in {path or 'the packaged word list'}")
    return sample_corpus(words, int(config[Option.CORPUS_SIZE]), int(config[Option.SEED]))  # type: ignore
