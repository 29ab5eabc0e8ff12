"""Corpus ranking and extraction of the extreme images per attribute."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..data.preprocess import PreprocessedImage
from ..data.records import ImageRecord
from ..models.metrics import score_images
from ..models.scorer import ScoringModel


@dataclass
class RankedCorpus:
    """All corpus images ordered by descending score, ties broken by id."""

    attribute: str
    entries: list[tuple[str, float]]
    model_checkpoint: str | None = None

    def __len__(self) -> int:
        return len(self.entries)


def rank_from_scores(scores: Mapping[str, float], attribute: str, model_checkpoint: str | None = None) -> RankedCorpus:
    if not scores:
        raise ValueError("cannot rank an empty corpus")
    entries = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return RankedCorpus(attribute=attribute, entries=entries, model_checkpoint=model_checkpoint)


def rank_corpus(
    model: ScoringModel,
    corpus: Sequence[ImageRecord],
    images: Mapping[str, PreprocessedImage],
    model_checkpoint: str | None = None,
) -> RankedCorpus:
    """Score every corpus image with ``model`` and sort descending."""
    if not corpus:
        raise ValueError("cannot rank an empty corpus")
    scores = score_images(model, images, [r.image_id for r in corpus])
    return rank_from_scores(scores, model.attribute.value, model_checkpoint)


def extremes(ranked: RankedCorpus, k: int = 50) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """The k highest and k lowest ranked entries; disjoint by construction."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if 2 * k > len(ranked):
        raise ValueError(f"need at least 2k={2 * k} images to take top/bottom {k}, corpus has {len(ranked)}")
    if k == 0:
        return [], []
    return ranked.entries[:k], ranked.entries[-k:]


def write_extremes(
    ranked: RankedCorpus,
    k: int,
    path,
) -> dict:
    """Persist extremes as JSON: the input to annotation-session creation."""
    top, bottom = extremes(ranked, k)
    payload = {
        "attribute": ranked.attribute,
        "model_checkpoint": ranked.model_checkpoint,
        "k": k,
        "top": [{"image_id": i, "score": s} for i, s in top],
        "bottom": [{"image_id": i, "score": s} for i, s in bottom],
    }
    path = Path(path)
    existing = []
    if path.exists():
        existing = json.loads(path.read_text(encoding="utf-8"))
        existing = [e for e in existing if e["attribute"] != ranked.attribute]
    existing.append(payload)
    path.write_text(json.dumps(existing, indent=2) + "\n", encoding="utf-8")
    return payload


def load_extremes(path) -> list[dict]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
