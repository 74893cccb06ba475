from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional
from enum import Enum, auto

from glyphread.alphabet import DEFAULT_SYMBOLS
from glyphread.options import DEFAULT_CONFIG, Option, Pair, UnionT


class TakesVal(Enum):
    YES = auto()
    NO = auto()
    OPTIONAL = auto()


class MultivaluedEnum(Enum):
    def __new__(cls, *args: Any, **kwds: Any) -> Any:
        value = len(cls.__members__) + 1
        obj = object.__new__(cls)
        obj._value_ = value
        return obj


class Type(MultivaluedEnum):
    """Converters from the textual form of a value; None marks an invalid value."""

    @staticmethod
    def _to_bool_val(val: Optional[str]) -> Optional[bool]:
        if val is None or val.lower() in ("true", "on", "yes", "1"):
            return True
        if val.lower() in ("false", "off", "no", "0"):
            return False
        return None

    @staticmethod
    def _to_int_val(val: Optional[str]) -> Optional[int]:
        try:
            return int(val) if val is not None else None
        except ValueError:
            return None

    @staticmethod
    def _to_float_val(val: Optional[str]) -> Optional[float]:
        try:
            return float(val) if val is not None else None
        except ValueError:
            return None

    @staticmethod
    def _to_str_val(val: Optional[str]) -> Optional[str]:
        return val

    @staticmethod
    def _to_int_list_val(val: Optional[str]) -> Optional[List[int]]:
        try:
            return [int(v) for v in val.split(",")] if val else None
        except ValueError:
            return None

    @staticmethod
    def _to_float_list_val(val: Optional[str]) -> Optional[List[float]]:
        try:
            return [float(v) for v in val.split(",")] if val else None
        except ValueError:
            return None

    @staticmethod
    def _to_pair_list_val(val: Optional[str]) -> Optional[List[Pair]]:
        if not val:
            return None
        result = []
        for item in val.split(","):
            parts = item.lower().split("x")
            if len(parts) != 2 or not all(p.strip().isdecimal() for p in parts):
                return None
            result.append((int(parts[0]), int(parts[1])))
        return result

    def __init__(self, _: Enum, convert: Callable[[Optional[str]], UnionT]):
        self.convert: Callable[[Optional[str]], UnionT] = convert.__func__  # type: ignore

    def __call__(self, arg: Optional[str]) -> UnionT:
        return self.convert(arg)

    BOOL = (auto(), _to_bool_val)
    INT = (auto(), _to_int_val)
    FLOAT = (auto(), _to_float_val)
    STR = (auto(), _to_str_val)
    INT_LIST = (auto(), _to_int_list_val)
    FLOAT_LIST = (auto(), _to_float_list_val)
    PAIR_LIST = (auto(), _to_pair_list_val)


@dataclass
class OptionParse:
    option: Option
    help_: str
    takes_val: TakesVal
    default: UnionT
    convert: Type


def _value(option: Option, help_: str, default: UnionT, convert: Type) -> OptionParse:
    return OptionParse(option, help_, TakesVal.YES, default, convert)


def _flag(option: Option, help_: str, default: bool) -> OptionParse:
    return OptionParse(option, help_, TakesVal.OPTIONAL, default, Type.BOOL)


OPTIONS: List[OptionParse] = [
    _value(
        Option.CONFIG_FILE,
        "config file with hyperparameters (packaged name such as default, toy, quick, or a local path)",
        DEFAULT_CONFIG,
        Type.STR,
    ),
    _value(Option.SEED, "seed for initialization, shuffling and rendering", 0, Type.INT),
    # model
    _value(Option.INPUT_HEIGHT, "height of input images in pixels", 32, Type.INT),
    _value(Option.CONV_CHANNELS, "output channels of each 3x3 convolution", [16, 32, 64], Type.INT_LIST),
    _value(
        Option.CONV_STRIDES,
        "row x column stride of each convolution, e.g. 1x1,1x2,1x1",
        [(1, 1), (1, 2), (1, 1)],
        Type.PAIR_LIST,
    ),
    _value(
        Option.CONV_POOLS,
        "row x column max-pool after each convolution, 1x1 for none",
        [(2, 2), (2, 2), (1, 1)],
        Type.PAIR_LIST,
    ),
    _flag(Option.CENTER_IMAGES, "subtract the per-image mean before the encoder", True),
    _value(Option.HIDDEN_SIZE, "LSTM hidden size", 256, Type.INT),
    _value(Option.EMBEDDING_SIZE, "character embedding size", 128, Type.INT),
    _value(Option.ATTENTION_SIZE, "hidden size of the attention scorer", 64, Type.INT),
    _flag(
        Option.ATTENTION,
        "use soft attention; when off, features reach the decoder only at the first step",
        True,
    ),
    _value(Option.SYMBOLS, "alphabet symbols, END is appended", DEFAULT_SYMBOLS, Type.STR),
    _value(Option.MAX_LENGTH, "maximum number of decoding steps, END included", 32, Type.INT),
    # training
    _value(Option.LEARNING_RATE, "Adam learning rate", 1e-3, Type.FLOAT),
    _value(Option.BATCH_SIZE, "mini-batch size", 32, Type.INT),
    _value(Option.EPOCHS, "number of training epochs", 20, Type.INT),
    _value(Option.CLIP_NORM, "global gradient norm clip", 5.0, Type.FLOAT),
    _value(Option.VALIDATION_FRACTION, "fraction of training samples held out for validation", 0.1, Type.FLOAT),
    # data
    _value(Option.CORPUS_SIZE, "number of words sampled from the word list", 500, Type.INT),
    _value(Option.TRAIN_RENDERS, "training renders per word", 10, Type.INT),
    _value(Option.TEST_RENDERS, "test renders per word", 3, Type.INT),
    _value(Option.RENDER_SCALE, "pixels per glyph cell", 3, Type.INT),
    _value(Option.RENDER_MARGIN, "horizontal margin in pixels", 6, Type.INT),
    _value(Option.RENDER_JITTER, "maximum per-glyph offset in pixels", 1, Type.INT),
    _value(Option.RENDER_NOISE, "standard deviation of additive Gaussian noise", 0.05, Type.FLOAT),
    _value(Option.FOREGROUND, "range of foreground intensities", [0.7, 1.0], Type.FLOAT_LIST),
    _value(Option.BACKGROUND, "range of background intensities", [0.0, 0.3], Type.FLOAT_LIST),
    # decoding
    _value(Option.BEAM_WIDTH, "number of hypotheses kept per step", 16, Type.INT),
    _value(Option.LM_WEIGHT, "weight of the language model term", 0.25, Type.FLOAT),
    _value(Option.LM_ORDER, "longest n-gram order of the language model", 6, Type.INT),
    _value(Option.LM_SMOOTHING, "add-delta smoothing constant of the language model", 0.1, Type.FLOAT),
    _flag(Option.LM_SCORES_END, "apply the language model to the END symbol", True),
    _value(Option.LEXICON_MODE, "prune (trie-constrained search) or edit (nearest word)", "prune", Type.STR),
    _value(Option.LEXICON_SIZE, "size of per-image distractor lexicons, 0 for none", 0, Type.INT),
    _value(Option.MIN_LENGTH, "evaluation keeps ground truths of at least this length", 3, Type.INT),
]


def get_option_parses() -> Dict[Option, OptionParse]:
    return {parse.option: parse for parse in OPTIONS}
