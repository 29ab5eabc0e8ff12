"""Transfer-learning loop for scoring models on pairwise comparisons."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import torch

from ..data.preprocess import PreprocessedImage
from ..data.records import Comparison, DatasetSplit
from ..models.losses import ranking_loss_batch
from ..models.metrics import evaluate_comparisons
from ..models.pairs import collate_pairs
from ..models.scorer import ScoringModel
from .checkpoint import save_checkpoint
from .config import TrainConfig


@dataclass
class EpochEntry:
    epoch: int
    train_loss: float
    val_accuracy: float
    seconds: float

    def to_json(self) -> dict:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_accuracy": self.val_accuracy,
            "seconds": self.seconds,
        }


@dataclass
class TrainReport:
    """One entry per completed epoch plus the best checkpoint reference."""

    epochs: list[EpochEntry] = field(default_factory=list)
    best_epoch: int = 0
    best_val_accuracy: float = float("-inf")
    checkpoint_dir: str | None = None

    def to_json(self) -> dict:
        return {
            "epochs": [e.to_json() for e in self.epochs],
            "best_epoch": self.best_epoch,
            "best_val_accuracy": self.best_val_accuracy,
            "checkpoint_dir": self.checkpoint_dir,
        }


def _check_attribute(model: ScoringModel, comparisons: Sequence[Comparison]) -> None:
    for comp in comparisons:
        if comp.attribute != model.attribute:
            raise ValueError(
                f"model is for attribute {model.attribute.value!r} but a comparison "
                f"is about {comp.attribute.value!r}"
            )


def train(
    model: ScoringModel,
    split: DatasetSplit,
    images: Mapping[str, PreprocessedImage],
    config: TrainConfig = TrainConfig(),
    out_dir: str | Path | None = None,
    preprocess_config=None,
) -> TrainReport:
    """Fine-tune ``model`` on ``split.train``, validating each epoch.

    Runs exactly ``config.epochs`` epochs. Batch order is deterministic given
    ``config.seed``. The epoch with the best validation pairwise accuracy
    (ties broken by the earlier epoch) is persisted to ``out_dir`` when one
    is given; its parameters are also restored into ``model`` at the end.

    Raises on an attribute mismatch between model and comparisons, and
    aborts with a diagnostic if the loss goes non-finite.
    """
    if not split.train:
        raise ValueError("training split is empty")
    if not split.validation:
        raise ValueError("validation split is empty (needed for best-checkpoint selection)")
    _check_attribute(model, split.train)
    _check_attribute(model, split.validation)

    torch.manual_seed(config.seed)
    order_rng = random.Random(config.seed)
    optimizer = _build_optimizer(model, config)
    report = TrainReport()
    out_dir = Path(out_dir) if out_dir is not None else None
    best_state: dict | None = None

    for epoch in range(1, config.epochs + 1):
        start = time.monotonic()
        indices = list(range(len(split.train)))
        if config.shuffle:
            order_rng.shuffle(indices)

        model.train()
        total_loss = 0.0
        for batch_start in range(0, len(indices), config.batch_size):
            batch = collate_pairs(
                [split.train[i] for i in indices[batch_start : batch_start + config.batch_size]], images
            )
            optimizer.zero_grad(set_to_none=True)
            losses = ranking_loss_batch(model(batch.left), model(batch.right), batch.outcomes)
            loss = losses.mean()
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite training loss {loss.item()!r} at epoch {epoch}, "
                    f"batch starting at {batch_start}; aborting"
                )
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(batch)


        val_accuracy = evaluate_comparisons(model, split.validation, images)
        entry = EpochEntry(
            epoch=epoch,
            train_loss=total_loss / len(split.train),
            val_accuracy=val_accuracy,
            seconds=time.monotonic() - start,
        )
        report.epochs.append(entry)

        if val_accuracy > report.best_val_accuracy:
            report.best_val_accuracy = val_accuracy
            report.best_epoch = epoch
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}

    if best_state is not None:
        model.load_state_dict(best_state)
    if out_dir is not None:
        report.checkpoint_dir = str(
            save_checkpoint(
                model,
                out_dir,
                epoch=report.best_epoch,
                val_accuracy=report.best_val_accuracy,
                train_config=config,
                preprocess_config=preprocess_config,
            )
        )
    return report


def evaluate(
    model: ScoringModel,
    comparisons: Sequence[Comparison],
    images: Mapping[str, PreprocessedImage],
) -> float:
    """Pairwise accuracy on a comparison set (delegates to the metric)."""
    _check_attribute(model, comparisons)
    return evaluate_comparisons(model, comparisons, images)


def _build_optimizer(model: ScoringModel, config: TrainConfig) -> torch.optim.Optimizer:
    if config.optimizer_kind == "adam":
        return torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    return torch.optim.SGD(model.parameters(), lr=config.learning_rate, momentum=config.momentum)
