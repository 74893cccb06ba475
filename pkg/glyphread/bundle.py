"""
Versioned single-file model bundle.

Layout (little-endian): the 8-byte magic ``GLYPHBM1``, u32 format version,
u32 section count, then sections in name order. A section is u32 name length,
the UTF-8 name, a u8 kind, and either a float64 array (u32 ndim, u64 per
dimension, raw data) or a text blob (u64 length, UTF-8 bytes).
"""

from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Dict, List, Optional, Tuple, Union
import io
import json
import struct

import numpy as np

from glyphread.errors import BundleFormatError, ShapeError
from glyphread.inference.ngram import NgramModel
from glyphread.model.recognizer import ModelConfig, Recognizer

MAGIC = b"GLYPHBM1"
FORMAT_VERSION = 1

KIND_ARRAY = 0
KIND_TEXT = 1

PARAM_PREFIX = "param/"

Section = Union[np.ndarray, str]


@dataclass
class ModelBundle:
    model: Recognizer
    lm: Optional[NgramModel] = None
    lexicon: Optional[List[str]] = None


def _sections(bundle: ModelBundle) -> Dict[str, Section]:
    sections: Dict[str, Section] = {
        "config": json.dumps(bundle.model.config.to_dict(), sort_keys=True),
        "alphabet": bundle.model.alphabet.chars,
    }
    for name, value in bundle.model.params.items():
        sections[PARAM_PREFIX + name] = value
    if bundle.lm is not None:
        sections["lm"] = json.dumps(bundle.lm.to_dict(), sort_keys=True)
    if bundle.lexicon is not None:
        sections["lexicon"] = "\n".join(bundle.lexicon) + "\n"
    return sections


def _write_section(out: BinaryIO, name: str, value: Section) -> None:
    encoded = name.encode("utf8")
    out.write(struct.pack("<I", len(encoded)))
    out.write(encoded)
    if isinstance(value, str):
        data = value.encode("utf8")
        out.write(struct.pack("<BQ", KIND_TEXT, len(data)))
        out.write(data)
    else:
        array = np.ascontiguousarray(value, dtype="<f8")
        out.write(struct.pack("<BI", KIND_ARRAY, array.ndim))
        out.write(struct.pack(f"<{array.ndim}Q", *array.shape))
        out.write(array.tobytes())


def dumps(bundle: ModelBundle) -> bytes:
    sections = _sections(bundle)
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<II", FORMAT_VERSION, len(sections)))
    for name in sorted(sections):
        _write_section(out, name, sections[name])
    return out.getvalue()


def save_bundle(path: Union[str, Path], bundle: ModelBundle) -> None:
    with open(path, "wb") as f:
        f.write(dumps(bundle))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise BundleFormatError(f"bundle truncated while reading {what}")
        chunk = self.data[self.offset: self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def loads(data: bytes) -> ModelBundle:
    reader = _Reader(data)
    magic = reader.take(len(MAGIC), "magic")
    if magic != MAGIC:
        raise BundleFormatError(f"not a model bundle (magic {magic!r})")
    version, count = reader.unpack("<II", "header")
    if version != FORMAT_VERSION:
        raise BundleFormatError(
            f"bundle format version {version} is not supported (expected {FORMAT_VERSION})"
        )

    sections: Dict[str, Section] = {}
    for _ in range(count):
        (name_length,) = reader.unpack("<I", "section name")
        name = reader.take(name_length, "section name").decode("utf8")
        (kind,) = reader.unpack("<B", f"section {name}")
        if kind == KIND_TEXT:
            (length,) = reader.unpack("<Q", f"section {name}")
            sections[name] = reader.take(length, f"section {name}").decode("utf8")
        elif kind == KIND_ARRAY:
            (ndim,) = reader.unpack("<I", f"section {name}")
            shape = reader.unpack(f"<{ndim}Q", f"section {name}")
            size = int(np.prod(shape)) if ndim else 1
            raw = reader.take(8 * size, f"section {name}")
            sections[name] = np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)
        else:
            raise BundleFormatError(f"section {name} has unknown kind {kind}")
    if reader.offset != len(data):
        raise BundleFormatError(f"{len(data) - reader.offset} trailing bytes after the last section")

    for required in ("config", "alphabet"):
        if required not in sections:
            raise BundleFormatError(f"bundle has no {required} section")

    try:
        config = ModelConfig.from_dict(json.loads(sections["config"]))
    except (KeyError, TypeError, ValueError) as e:
        raise BundleFormatError(f"invalid model configuration in bundle: {e}") from e
    if sections["alphabet"] != config.symbols:
        raise BundleFormatError("alphabet section does not match the model configuration")

    params = {
        name[len(PARAM_PREFIX):]: value
        for name, value in sections.items()
        if name.startswith(PARAM_PREFIX)
    }
    try:
        model = Recognizer(config, params)
    except ShapeError as e:
        raise BundleFormatError(f"bundle parameters do not match its configuration: {e}") from e

    lm = NgramModel.from_dict(json.loads(sections["lm"])) if "lm" in sections else None
    lexicon = [w for w in sections["lexicon"].split("\n") if w] if "lexicon" in sections else None
    return ModelBundle(model, lm, lexicon)


def load_bundle(path: Union[str, Path]) -> ModelBundle:
    with open(path, "rb") as f:
        return loads(f.read())
