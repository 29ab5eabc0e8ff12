"""Synthetic bright-rectangle benchmark corpus.

Each image is a noisy gray background with one bright axis-aligned
rectangle; the latent perception score is the rectangle's pixel area. The
latent is fully recoverable from pixels, so noiseless comparisons sampled
from it give an end-to-end benchmark with a known ground truth: a model
that learns the task must rank by rectangle size, and a faithful saliency
method must put its mass inside the rectangle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .data.records import Comparison, ImageRecord, PerceptualAttribute


@dataclass
class SyntheticCorpus:
    records: list[ImageRecord]
    latents: dict[str, float]      # image_id -> rectangle area in pixels
    masks: dict[str, np.ndarray]   # image_id -> boolean rectangle mask
    manifest_path: Path


def make_rectangle_corpus(
    out_dir,
    n_images: int = 200,
    side: int = 64,
    seed: int = 0,
) -> SyntheticCorpus:
    """Write ``n_images`` PNGs plus a manifest under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    records: list[ImageRecord] = []
    latents: dict[str, float] = {}
    masks: dict[str, np.ndarray] = {}
    rows = []
    for index in range(n_images):
        image_id = f"synth{index:04d}"
        background = rng.normal(0.35, 0.08, size=(side, side))
        width = int(rng.integers(6, side // 2 + 1))
        height = int(rng.integers(6, side // 2 + 1))
        top = int(rng.integers(0, side - height + 1))
        left = int(rng.integers(0, side - width + 1))
        pixels = np.clip(background, 0.0, 1.0)
        pixels[top : top + height, left : left + width] = 0.95
        mask = np.zeros((side, side), dtype=bool)
        mask[top : top + height, left : left + width] = True

        file_name = f"{image_id}.png"
        array = np.repeat((pixels * 255).astype(np.uint8)[:, :, None], 3, axis=2)
        Image.fromarray(array).save(out_dir / file_name)

        records.append(ImageRecord(image_id=image_id, file_path=out_dir / file_name,
                                   city=None, width=side, height=side))
        latents[image_id] = float(width * height)
        masks[image_id] = mask
        rows.append((image_id, file_name, ""))

    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "file_path", "city"])
        writer.writerows(rows)
    return SyntheticCorpus(records=records, latents=latents, masks=masks, manifest_path=manifest_path)


def make_comparisons(
    latents: dict[str, float],
    n_pairs: int = 2000,
    attribute: PerceptualAttribute = PerceptualAttribute.SAFETY,
    seed: int = 0,
) -> list[Comparison]:
    """Noiseless comparisons: the outcome always follows the latent scores.

    Pairs with equal latents are skipped (resampled), so every comparison
    has a strict ground-truth order.
    """
    rng = np.random.default_rng(seed)
    ids = sorted(latents)
    comparisons: list[Comparison] = []
    while len(comparisons) < n_pairs:
        i, j = rng.integers(0, len(ids), size=2)
        if i == j or latents[ids[i]] == latents[ids[j]]:
            continue
        outcome = 1 if latents[ids[i]] > latents[ids[j]] else -1
        comparisons.append(Comparison(left=ids[i], right=ids[j], attribute=attribute, outcome=outcome))
    return comparisons


def write_comparisons_csv(comparisons: list[Comparison], path) -> Path:
    """Persist comparisons in the ingestion CSV format."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "left_image", "right_image", "attribute", "choice"])
        for index, comp in enumerate(comparisons):
            choice = "left" if comp.outcome == 1 else "right"
            writer.writerow([f"p{index:05d}", comp.left, comp.right, comp.attribute.value, choice])
    return path
