"""Saliency map container and the shared normalize/upsample plumbing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

SALIENCY_METHODS = ("gradcam", "eigencam", "ablationcam", "attention_rollout")
SIGNS = ("positive", "negative")


@dataclass
class SaliencyMap:
    """Per-pixel importance for one (image, model, method, sign) combination.

    ``grid`` is the map at feature resolution, min-max normalized into [0, 1]
    (all zeros when the raw map was constant). ``upsampled`` is its bilinear
    interpolation at the resolution of the image the model scored. The raw
    extrema before normalization are kept for provenance.
    """

    image_id: str
    attribute: str
    method: str
    sign: str
    grid: np.ndarray
    upsampled: np.ndarray
    raw_min: float
    raw_max: float


def minmax_normalize(raw: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Scale into [0, 1]; a constant map collapses to all zeros."""
    raw = np.asarray(raw, dtype=np.float64)
    raw_min = float(raw.min())
    raw_max = float(raw.max())
    if raw_max == raw_min:
        return np.zeros_like(raw), raw_min, raw_max
    return (raw - raw_min) / (raw_max - raw_min), raw_min, raw_max


def upsample_bilinear(grid: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize of a 2-D map; values stay within the input's range."""
    tensor = torch.from_numpy(np.asarray(grid, dtype=np.float64))[None, None]
    resized = torch.nn.functional.interpolate(
        tensor, size=(height, width), mode="bilinear", align_corners=False
    )
    return resized[0, 0].numpy()


def build_map(raw: np.ndarray, *, image_id: str, attribute: str, method: str, sign: str,
              target_hw: tuple[int, int]) -> SaliencyMap:
    """Normalize a raw feature-resolution map and attach its upsampled version."""
    grid, raw_min, raw_max = minmax_normalize(raw)
    upsampled = upsample_bilinear(grid, *target_hw)
    return SaliencyMap(
        image_id=image_id,
        attribute=attribute,
        method=method,
        sign=sign,
        grid=grid,
        upsampled=upsampled,
        raw_min=raw_min,
        raw_max=raw_max,
    )
