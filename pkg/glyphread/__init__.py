from .alphabet import Alphabet
from .model.recognizer import ModelConfig, Recognizer
from .inference.beamsearch import DecodeConfig, DecodeResult, beam_decode
from .inference.ngram import NgramModel
from .bundle import ModelBundle, load_bundle, save_bundle

__all__ = [
    "Alphabet",
    "ModelConfig",
    "Recognizer",
    "DecodeConfig",
    "DecodeResult",
    "beam_decode",
    "NgramModel",
    "ModelBundle",
    "load_bundle",
    "save_bundle",
]

__version__ = "1.0.0"
__version_info__ = tuple(map(int, __version__.split(".")))
