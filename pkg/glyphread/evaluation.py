"""
Word-level accuracy of a recognizer over a labelled set of images.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import Levenshtein
from dataclasses_json import dataclass_json
from tqdm import tqdm

from glyphread.alphabet import normalize_word
from glyphread.errors import InputError
from glyphread.inference.beamsearch import DecodeConfig, beam_decode
from glyphread.inference.lexicon import build_trie, distractor_lexicon
from glyphread.model.recognizer import Recognizer
from glyphread.synth.dataset import Sample


@dataclass_json
@dataclass
class Prediction:
    id: str
    truth: str
    predicted: str
    score: float
    correct: bool
    edit_distance: float

    def to_tsv(self) -> str:
        return f"{self.id}\t{self.truth}\t{self.predicted}\t{self.score:.6f}\t{int(self.correct)}\t{self.edit_distance:.6f}"


@dataclass_json
@dataclass
class EvalSummary:
    total: int
    correct: int
    accuracy: float
    mean_edit_distance: float

    def lines(self) -> List[str]:
        return [
            f"total\t{self.total}",
            f"correct\t{self.correct}",
            f"accuracy\t{self.accuracy:.2f}",
            f"mean_edit_distance\t{self.mean_edit_distance:.4f}",
        ]


PREDICTIONS_HEADER = "id\ttruth\tpredicted\tscore\tcorrect\tedit_distance"


def normalized_edit_distance(predicted: str, truth: str) -> float:
    longest = max(len(predicted), len(truth))
    return Levenshtein.distance(predicted, truth) / longest if longest else 0.0


def filter_protocol(samples: Sequence[Sample], min_length: int = 3) -> List[Sample]:
    """Samples whose ground truth is alphanumeric and at least ``min_length`` long."""
    return [
        s for s in samples
        if normalize_word(s.word).isalnum() and len(normalize_word(s.word)) >= min_length
    ]


def summarize(predictions: Sequence[Prediction]) -> EvalSummary:
    if not predictions:
        raise InputError("cannot summarize an empty evaluation")
    correct = sum(p.correct for p in predictions)
    return EvalSummary(
        total=len(predictions),
        correct=correct,
        accuracy=100.0 * correct / len(predictions),
        mean_edit_distance=sum(p.edit_distance for p in predictions) / len(predictions),
    )


def per_sample_config(
    config: DecodeConfig, sample: Sample, vocabulary: Sequence[str], lexicon_size: int, seed: int
) -> DecodeConfig:
    """``config`` restricted to a distractor lexicon of ``lexicon_size`` words around the truth."""
    words = distractor_lexicon(vocabulary, normalize_word(sample.word), lexicon_size, seed)
    if config.lexicon_mode == "edit":
        return replace(config, trie=None, lexicon_words=words)
    return replace(config, trie=build_trie(words), lexicon_words=None)


def predict(model: Recognizer, sample: Sample, config: DecodeConfig) -> Prediction:
    results = beam_decode(model, sample.image, config)
    truth = normalize_word(sample.word)
    predicted = normalize_word(results[0].word) if results else ""
    score = results[0].score if results else float("-inf")
    return Prediction(
        sample.id, truth, predicted, score, predicted == truth, normalized_edit_distance(predicted, truth)
    )


def evaluate(
    model: Recognizer,
    samples: Sequence[Sample],
    config: DecodeConfig,
    jobs: int = 1,
    lexicon_size: int = 0,
    vocabulary: Optional[Sequence[str]] = None,
    seed: int = 0,
    progress: bool = False,
) -> Tuple[List[Prediction], EvalSummary]:
    """
    Decodes every sample and compares case-insensitively with its label.

    With ``lexicon_size`` set, each sample is decoded against its own
    lexicon: the ground truth plus random distractors from ``vocabulary``.
    """
    if not samples:
        raise InputError("cannot evaluate on an empty dataset")
    if lexicon_size and not vocabulary:
        raise InputError("per-image lexicons need a vocabulary to draw distractors from")

    def run(indexed: Tuple[int, Sample]) -> Prediction:
        i, sample = indexed
        sample_config = config
        if lexicon_size:
            sample_config = per_sample_config(config, sample, vocabulary, lexicon_size, seed + i)  # type: ignore
        return predict(model, sample, sample_config)

    indexed = list(enumerate(samples))
    bar = tqdm(total=len(samples), desc="decoding", disable=not progress, leave=False)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            predictions = []
            for prediction in pool.map(run, indexed):
                predictions.append(prediction)
                bar.update()
    else:
        predictions = []
        for item in indexed:
            predictions.append(run(item))
            bar.update()
    bar.close()

    return predictions, summarize(predictions)
