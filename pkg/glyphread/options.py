from typing import Any, List, Optional, Tuple, TypeVar, Union
from enum import Enum


class NumberFromZero(Enum):
    def __new__(cls, *args: Any) -> "NumberFromZero":
        value = len(cls.__members__)
        obj = object.__new__(cls)
        obj._value_ = value
        return obj


T = TypeVar("T")
Pair = Tuple[int, int]
UnionT = Union[bool, int, float, Optional[str], List[int], List[float], List[Pair]]
ImmutableT = Union[bool, int, float, Optional[str], Tuple[int, ...], Tuple[float, ...], Tuple[Pair, ...]]


class Option(NumberFromZero):
    CONFIG_FILE = ()
    SEED = ()

    INPUT_HEIGHT = ()
    CONV_CHANNELS = ()
    CONV_STRIDES = ()
    CONV_POOLS = ()
    CENTER_IMAGES = ()
    HIDDEN_SIZE = ()
    EMBEDDING_SIZE = ()
    ATTENTION_SIZE = ()
    ATTENTION = ()
    SYMBOLS = ()
    MAX_LENGTH = ()

    LEARNING_RATE = ()
    BATCH_SIZE = ()
    EPOCHS = ()
    CLIP_NORM = ()
    VALIDATION_FRACTION = ()

    CORPUS_SIZE = ()
    TRAIN_RENDERS = ()
    TEST_RENDERS = ()
    RENDER_SCALE = ()
    RENDER_MARGIN = ()
    RENDER_JITTER = ()
    RENDER_NOISE = ()
    FOREGROUND = ()
    BACKGROUND = ()

    BEAM_WIDTH = ()
    LM_WEIGHT = ()
    LM_ORDER = ()
    LM_SMOOTHING = ()
    LM_SCORES_END = ()
    LEXICON_MODE = ()
    LEXICON_SIZE = ()
    MIN_LENGTH = ()

    def to_name(self) -> str:
        return self.name.lower().replace("_", "-")

    @staticmethod
    def safe_from_name(option_str: str) -> Optional["Option"]:
        aliased = OPTION_ALIASES.get(option_str.lower())
        if aliased is not None:
            return aliased

        for option in Option:
            if option.to_name() == option_str.lower():
                return option
        return None

    @staticmethod
    def from_name(option_str: str) -> "Option":
        option = Option.safe_from_name(option_str)
        if option is not None:
            return option

        assert False, "no such option: " + option_str

    def __int__(self) -> int:
        return self.value  # type: ignore


OPTION_ALIASES = {
    "config": Option.CONFIG_FILE,
    "alpha": Option.LM_WEIGHT,
    "beam": Option.BEAM_WIDTH,
    "noise": Option.RENDER_NOISE,
}

DEFAULT_CONFIG = "default"
BASE_CONFIG = "empty"
