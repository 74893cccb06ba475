"""
Component ablation and learning-curve runs on synthetic data.
"""

from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence

from dataclasses_json import dataclass_json
from loguru import logger

from glyphread.errors import InputError
from glyphread.evaluation import evaluate
from glyphread.inference.beamsearch import DecodeConfig
from glyphread.inference.lexicon import build_trie
from glyphread.inference.ngram import NgramModel
from glyphread.model.recognizer import ModelConfig, Recognizer
from glyphread.synth.dataset import Sample, generate_dataset, generate_split
from glyphread.synth.render import RenderConfig
from glyphread.training.trainer import EpochRecord, TrainConfig, train


@dataclass_json
@dataclass
class AblationRow:
    system: str
    accuracy: float
    mean_edit_distance: float

    def to_tsv(self) -> str:
        return f"{self.system}\t{self.accuracy:.2f}\t{self.mean_edit_distance:.4f}"


@dataclass_json
@dataclass
class CurvePoint:
    renders: int
    accuracy: float
    accuracy_lm: float

    def to_tsv(self) -> str:
        return f"{self.renders}\t{self.accuracy:.2f}\t{self.accuracy_lm:.2f}"


ABLATION_HEADER = "system\taccuracy\tmean_edit_distance"
CURVE_HEADER = "renders\taccuracy\taccuracy_lm"


def _accuracy(
    model: Recognizer,
    test: Sequence[Sample],
    config: DecodeConfig,
    jobs: int,
    lexicon_size: int = 0,
    vocabulary: Optional[Sequence[str]] = None,
    progress: bool = False,
) -> AblationRow:
    _, summary = evaluate(model, test, config, jobs, lexicon_size, vocabulary, progress=progress)
    return AblationRow("", summary.accuracy, summary.mean_edit_distance)


def run_ablation(
    model_config: ModelConfig,
    train_config: TrainConfig,
    render_config: RenderConfig,
    corpus: Sequence[str],
    train_renders: int,
    test_renders: int,
    decode_config: DecodeConfig,
    lm: NgramModel,
    lexicon_size: int = 0,
    report: Optional[Callable[[EpochRecord], None]] = None,
    progress: bool = False,
) -> List[AblationRow]:
    """
    Trains the no-attention baseline and the attention model on the same
    renders and scores both on the same test renders. The attention model is
    decoded without help, with the language model, and with the language
    model plus the lexicon (the whole corpus, or per-image distractor
    lexicons of ``lexicon_size`` words).
    """
    if not corpus:
        raise InputError("cannot run an ablation on an empty corpus")
    train_set, test = generate_split(corpus, train_renders, test_renders, render_config, progress)
    plain = replace(decode_config, lm=None, trie=None, lexicon_words=None, lexicon_mode="prune")

    logger.info("training the no-attention baseline")
    baseline, _ = train(replace(model_config, attention=False), train_config, train_set, report, progress=progress)
    logger.info("training the attention model")
    model, _ = train(replace(model_config, attention=True), train_config, train_set, report, progress=progress)

    with_lm = replace(plain, lm=lm)
    if lexicon_size:
        with_lexicon = replace(with_lm, lexicon_mode=decode_config.lexicon_mode)
    elif decode_config.lexicon_mode == "edit":
        with_lexicon = replace(with_lm, lexicon_mode="edit", lexicon_words=list(corpus))
    else:
        with_lexicon = replace(with_lm, trie=build_trie(corpus))

    jobs = train_config.jobs
    rows = [
        replace(_accuracy(baseline, test, plain, jobs, progress=progress), system="baseline"),
        replace(_accuracy(model, test, plain, jobs, progress=progress), system="attention"),
        replace(_accuracy(model, test, with_lm, jobs, progress=progress), system="attention+lm"),
        replace(
            _accuracy(model, test, with_lexicon, jobs, lexicon_size, corpus, progress),
            system="attention+lm+lexicon",
        ),
    ]
    for row in rows:
        logger.info("{system}: {accuracy:.2f}%", system=row.system, accuracy=row.accuracy)
    return rows


def learning_curve(
    sizes: Sequence[int],
    model_config: ModelConfig,
    train_config: TrainConfig,
    render_config: RenderConfig,
    corpus: Sequence[str],
    test_renders: int,
    decode_config: DecodeConfig,
    lm: NgramModel,
    progress: bool = False,
) -> List[CurvePoint]:
    """
    Accuracy with and without the language model against the number of
    training renders per word. Every size is scored on one fixed test set.
    """
    if not sizes or min(sizes) < 1:
        raise InputError(f"training sizes must be positive, got {list(sizes)}")
    first = render_config.seed * 1_000_000
    test = generate_dataset(corpus, test_renders, render_config, first + len(corpus) * max(sizes), progress)
    plain = replace(decode_config, lm=None, trie=None, lexicon_words=None, lexicon_mode="prune")
    with_lm = replace(plain, lm=lm)

    points = []
    for size in sorted(set(sizes)):
        train_set = generate_dataset(corpus, size, render_config, first, progress)
        model, _ = train(model_config, train_config, train_set, progress=progress)
        point = CurvePoint(
            size,
            _accuracy(model, test, plain, train_config.jobs).accuracy,
            _accuracy(model, test, with_lm, train_config.jobs).accuracy,
        )
        logger.info(
            "{renders} renders per word: {acc:.2f}% / {acc_lm:.2f}% with the language model",
            renders=size, acc=point.accuracy, acc_lm=point.accuracy_lm,
        )
        points.append(point)
    return points
