"""
Teacher-forced mini-batch training of the whole recognizer.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple
import time

import numpy as np
from dataclasses_json import dataclass_json
from loguru import logger
from tqdm import tqdm

from glyphread.errors import InputError, NumericError
from glyphread.model.recognizer import ModelConfig, Params, Recognizer
from glyphread.synth.dataset import Sample
from glyphread.training.optimizer import Adam, clip_by_global_norm


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 10
    clip_norm: float = 5.0
    seed: int = 0
    validation_fraction: float = 0.1
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch size must be at least 1, got {self.batch_size}")
        if not 0 <= self.validation_fraction < 1:
            raise ValueError(f"validation fraction must be in [0, 1), got {self.validation_fraction}")


@dataclass_json
@dataclass
class EpochRecord:
    epoch: int
    loss: float
    val_acc: Optional[float]
    secs: float = field(compare=False)

    def progress_line(self) -> str:
        val_acc = "-" if self.val_acc is None else f"{self.val_acc:.4f}"
        return f"epoch {self.epoch} loss {self.loss:.6f} val_acc {val_acc} secs {self.secs:.2f}"


@dataclass_json
@dataclass
class TrainLog:
    epochs: List[EpochRecord] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.epochs[-1].loss if self.epochs else float("nan")

    def to_tsv(self) -> str:
        lines = ["epoch\tloss\tval_acc\tsecs"]
        for record in self.epochs:
            val_acc = "" if record.val_acc is None else f"{record.val_acc:.6f}"
            lines.append(f"{record.epoch}\t{record.loss:.6f}\t{val_acc}\t{record.secs:.3f}")
        return "\n".join(lines) + "\n"


def split_validation(
    samples: Sequence[Sample], fraction: float, rng: np.random.Generator
) -> Tuple[List[Sample], List[Sample]]:
    order = rng.permutation(len(samples))
    n_val = int(round(len(samples) * fraction))
    if n_val >= len(samples):
        n_val = len(samples) - 1
    train = [samples[i] for i in order[n_val:]]
    validation = [samples[i] for i in order[:n_val]]
    return train, validation


def word_accuracy(model: Recognizer, samples: Sequence[Sample]) -> float:
    if not samples:
        return 0.0
    correct = sum(model.greedy_decode(s.image) == s.word for s in samples)
    return correct / len(samples)


def batch_gradients(
    model: Recognizer, batch: Sequence[Sample], pool: Optional[ThreadPoolExecutor]
) -> Tuple[float, Params]:
    """Mean loss and mean gradient over ``batch``."""
    if pool is None:
        results = [model.forward_backward(s.image, s.word) for s in batch]
    else:
        results = list(pool.map(lambda s: model.forward_backward(s.image, s.word), batch))

    total_loss = 0.0
    total = {name: np.zeros_like(value) for name, value in model.params.items()}
    # fixed summation order
    for loss, grads in results:
        total_loss += loss
        for name, grad in grads.items():
            total[name] += grad
    scale = 1.0 / len(batch)
    return total_loss * scale, {name: g * scale for name, g in total.items()}


def train(
    model_config: ModelConfig,
    config: TrainConfig,
    samples: Sequence[Sample],
    report: Optional[Callable[[EpochRecord], None]] = None,
    model: Optional[Recognizer] = None,
    progress: bool = False,
) -> Tuple[Recognizer, TrainLog]:
    if not samples:
        raise InputError("cannot train on an empty dataset")

    rng = np.random.default_rng(config.seed)
    if model is None:
        model = Recognizer.create(model_config, config.seed)
    model.alphabet.validate([s.word for s in samples])

    train_set, validation = split_validation(samples, config.validation_fraction, rng)
    logger.info(
        "training on {train} samples, validating on {val}, {params} parameters",
        train=len(train_set), val=len(validation), params=model.parameter_count,
    )

    optimizer = Adam(model.params, config.learning_rate, config.beta1, config.beta2, config.eps)
    log = TrainLog()
    pool = ThreadPoolExecutor(config.jobs) if config.jobs > 1 else None
    try:
        for epoch in range(1, config.epochs + 1):
            start = time.perf_counter()
            order = rng.permutation(len(train_set))
            batches = [order[i: i + config.batch_size] for i in range(0, len(order), config.batch_size)]

            epoch_loss = 0.0
            for b, indices in enumerate(tqdm(batches, desc=f"epoch {epoch}", disable=not progress, leave=False)):
                batch = [train_set[i] for i in indices]
                loss, grads = batch_gradients(model, batch, pool)
                if not np.isfinite(loss):
                    words = ", ".join(s.word for s in batch[:5])
                    raise NumericError(
                        f"non-finite loss {loss} in epoch {epoch}, batch {b} (words: {words})"
                    )
                grads, norm = clip_by_global_norm(grads, config.clip_norm)
                if norm > config.clip_norm:
                    logger.debug("clipped gradient norm {norm:.3f} in batch {batch}", norm=norm, batch=b)
                optimizer.step(grads)
                epoch_loss += loss * len(batch)

            val_acc = word_accuracy(model, validation) if validation else None
            record = EpochRecord(epoch, epoch_loss / len(train_set), val_acc, time.perf_counter() - start)
            log.epochs.append(record)
            if report is not None:
                report(record)
    finally:
        if pool is not None:
            pool.shutdown()

    return model, log


def overfit_losses(model: Recognizer, sample: Sample, steps: int, learning_rate: float) -> List[float]:
    """Loss before each of ``steps`` full-gradient Adam updates on one sample."""
    optimizer = Adam(model.params, learning_rate)
    losses = []
    for _ in range(steps):
        loss, grads = model.forward_backward(sample.image, sample.word)
        losses.append(loss)
        grads, _ = clip_by_global_norm(grads, 5.0)
        optimizer.step(grads)
    return losses
