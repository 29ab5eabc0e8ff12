"""Pairwise-comparison accuracy and batched corpus scoring."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import torch

from ..data.preprocess import PreprocessedImage
from ..data.records import Comparison
from .scorer import ScoringModel


def pairwise_accuracy(scores: Mapping[str, float], comparisons: Sequence[Comparison]) -> float:
    """Fraction of comparisons where the preferred image scores strictly higher.

    A comparison counts as correct iff ``y * (f_left - f_right) > 0``; ties
    are incorrect. Undefined (raises) for an empty comparison list.
    """
    comparisons = list(comparisons)
    if not comparisons:
        raise ValueError("pairwise accuracy is undefined for an empty comparison list")
    correct = 0
    for comp in comparisons:
        try:
            delta = scores[comp.left] - scores[comp.right]
        except KeyError as exc:
            raise KeyError(f"no score for image {exc.args[0]!r} referenced by a comparison") from None
        if comp.outcome * delta > 0:
            correct += 1
    return correct / len(comparisons)


@torch.no_grad()
def score_images(
    model: ScoringModel,
    images: Mapping[str, PreprocessedImage],
    ids: Iterable[str] | None = None,
    batch_size: int = 64,
) -> dict[str, float]:
    """Inference-mode scores for the given image ids (all of ``images`` by default)."""
    ids = list(ids) if ids is not None else list(images)
    was_training = model.training
    model.eval()
    try:
        scores: dict[str, float] = {}
        for start in range(0, len(ids), batch_size):
            chunk = ids[start : start + batch_size]
            batch = torch.stack([images[i].tensor for i in chunk])
            values = model(batch)
            for image_id, value in zip(chunk, values.tolist()):
                scores[image_id] = float(value)
    finally:
        model.train(was_training)
    return scores


def evaluate_comparisons(
    model: ScoringModel,
    comparisons: Sequence[Comparison],
    images: Mapping[str, PreprocessedImage],
) -> float:
    """Pairwise accuracy of ``model`` on ``comparisons``; does not mutate parameters."""
    comparisons = list(comparisons)
    referenced = sorted({c.left for c in comparisons} | {c.right for c in comparisons})
    scores = score_images(model, images, referenced)
    return pairwise_accuracy(scores, comparisons)
