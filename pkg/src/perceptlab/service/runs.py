"""Resolution of a run directory: the on-disk layout the service serves from.

A run directory collects the pipeline outputs for one trained model:

    run/
      checkpoint/        weights.pt + manifest.json   (from `perceptlab train`)
      extremes.json      per-attribute top/bottom ids (from `perceptlab rank`)
      saliency/          overlay + heatmap PNGs       (from `perceptlab explain`)
      manifest.csv       image manifest (file paths relative to it)
      annotations.jsonl  append-only store, created on first submission
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..analysis.ranking import load_extremes
from ..data.corpus import load_corpus
from ..data.records import ImageRecord


@dataclass
class RunDirectory:
    root: Path
    corpus: list[ImageRecord]
    extremes: list[dict]
    saliency_dir: Path
    store_path: Path
    model_ref: str

    @classmethod
    def open(cls, root) -> "RunDirectory":
        root = Path(root)
        manifest = _first_existing(root / "manifest.csv", root / "images" / "manifest.csv")
        if manifest is None:
            raise FileNotFoundError(f"no manifest.csv found under {root}")
        extremes_path = root / "extremes.json"
        if not extremes_path.exists():
            raise FileNotFoundError(f"{extremes_path} not found; run the rank step first")
        saliency_dir = root / "saliency"
        if not saliency_dir.is_dir():
            raise FileNotFoundError(f"{saliency_dir} not found; run the explain step first")
        return cls(
            root=root,
            corpus=load_corpus(manifest),
            extremes=load_extremes(extremes_path),
            saliency_dir=saliency_dir,
            store_path=root / "annotations.jsonl",
            model_ref=_model_ref(root),
        )

    def find_image(self, image_id: str) -> ImageRecord | None:
        return next((r for r in self.corpus if r.image_id == image_id), None)


def _first_existing(*paths: Path) -> Path | None:
    return next((p for p in paths if p.exists()), None)


def _model_ref(root: Path) -> str:
    manifest = root / "checkpoint" / "manifest.json"
    if manifest.exists():
        return json.loads(manifest.read_text(encoding="utf-8")).get("backbone_kind", "model")
    return "model"
