"""
Labelled word-image datasets: generation, splits and the on-disk layout
``images/<id>.pgm`` plus ``labels.tsv``.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union
import os

import numpy as np
from loguru import logger
from PIL import Image
from tqdm import tqdm

from glyphread.alphabet import Alphabet, normalize_word
from glyphread.errors import InputError
from glyphread.synth.render import RenderConfig, render_word

LABELS_FILE = "labels.tsv"
IMAGES_DIR = "images"
PACKAGED_WORDS = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data", "words.txt")

PathLike = Union[str, Path]


@dataclass
class Sample:
    id: str
    word: str
    image: np.ndarray
    seed: Optional[int] = None


def generate_dataset(
    corpus: Sequence[str],
    samples_per_word: int,
    config: RenderConfig,
    first_seed: Optional[int] = None,
    progress: bool = False,
) -> List[Sample]:
    """
    ``samples_per_word`` renders of every corpus word, each with its own
    render seed, shuffled with ``config.seed``.
    """
    if not corpus:
        raise InputError("cannot generate a dataset from an empty corpus")
    seed = config.seed * 1_000_000 if first_seed is None else first_seed

    samples = []
    for word in tqdm(corpus, desc="rendering", disable=not progress, leave=False):
        for _ in range(samples_per_word):
            samples.append(Sample(f"r{seed}", word, render_word(word, config, seed), seed))
            seed += 1

    order = np.random.default_rng(config.seed).permutation(len(samples))
    return [samples[i] for i in order]


def generate_split(
    corpus: Sequence[str], train_per_word: int, test_per_word: int, config: RenderConfig, progress: bool = False
) -> Tuple[List[Sample], List[Sample]]:
    """In-vocabulary split: every word in both parts, render seeds disjoint."""
    first = config.seed * 1_000_000
    train = generate_dataset(corpus, train_per_word, config, first, progress)
    test = generate_dataset(corpus, test_per_word, config, first + len(corpus) * train_per_word, progress)
    return train, test


def split_words(corpus: Sequence[str], holdout_fraction: float, seed: int) -> Tuple[List[str], List[str]]:
    """Out-of-vocabulary split: no word lands in both parts."""
    words = sorted(set(corpus))
    order = np.random.default_rng(seed).permutation(len(words))
    n_holdout = int(round(len(words) * holdout_fraction))
    held_out = sorted(words[i] for i in order[:n_holdout])
    kept = sorted(words[i] for i in order[n_holdout:])
    return kept, held_out


def load_word_list(path: PathLike = PACKAGED_WORDS) -> List[str]:
    with open(path, encoding="utf8") as f:
        return [w for w in (normalize_word(line) for line in f) if w]


def usable_words(words: Iterable[str], alphabet: Alphabet) -> List[str]:
    result, skipped = [], 0
    for word in words:
        if all(c in alphabet for c in word):
            result.append(word)
        else:
            skipped += 1
    if skipped:
        logger.warning("skipped {count} words with characters outside the alphabet", count=skipped)
    return result


def sample_corpus(words: Sequence[str], n: int, seed: int) -> List[str]:
    distinct = sorted(set(words))
    if n >= len(distinct):
        return distinct
    picked = np.random.default_rng(seed).choice(len(distinct), size=n, replace=False)
    return sorted(distinct[i] for i in picked)


def to_bytes(image: np.ndarray) -> np.ndarray:
    return np.round(np.clip(image, 0.0, 1.0) * 255).astype(np.uint8)


def save_image(path: PathLike, image: np.ndarray) -> None:
    Image.fromarray(to_bytes(image)).save(path, format="PPM")


def load_image(path: PathLike) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.float64) / 255.0


def save_dataset(directory: PathLike, samples: Sequence[Sample]) -> None:
    directory = Path(directory)
    (directory / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
    with open(directory / LABELS_FILE, "w", encoding="utf8", newline="\n") as f:
        for sample in samples:
            save_image(directory / IMAGES_DIR / f"{sample.id}.pgm", sample.image)
            f.write(f"{sample.id}\t{sample.word}\n")


def load_dataset(directory: PathLike) -> List[Sample]:
    directory = Path(directory)
    labels = directory / LABELS_FILE
    if not labels.is_file():
        raise FileNotFoundError(f"dataset '{directory}' has no {LABELS_FILE}")

    samples = []
    with open(labels, encoding="utf8") as f:
        for number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise InputError(f"{labels}:{number}: expected '<id>\\t<word>'")
            sample_id, word = line.split("\t", 1)
            image = load_image(directory / IMAGES_DIR / f"{sample_id}.pgm")
            samples.append(Sample(sample_id, word, image))
    return samples
