"""Rendering and on-disk export of saliency maps."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from ..data.records import ImageRecord
from ..validation import check_unit_interval
from .maps import SaliencyMap, upsample_bilinear


def jet_colormap(values: np.ndarray) -> np.ndarray:
    """Classic blue-to-red heat colormap; input in [0,1], output (..., 3) in [0,1]."""
    v = np.asarray(values, dtype=np.float64)
    r = np.clip(1.5 - np.abs(4.0 * v - 3.0), 0.0, 1.0)
    g = np.clip(1.5 - np.abs(4.0 * v - 2.0), 0.0, 1.0)
    b = np.clip(1.5 - np.abs(4.0 * v - 1.0), 0.0, 1.0)
    return np.stack([r, g, b], axis=-1)


def upsample_and_overlay(
    smap: SaliencyMap,
    record: ImageRecord,
    alpha: float = 0.5,
    out_path=None,
) -> np.ndarray:
    """Blend the colormapped heatmap over the original image.

    The grid is bilinearly upsampled to the original image's size; the blend
    is ``(1 - alpha) * image + alpha * heatmap``. alpha=0 reproduces the
    original image, alpha=1 the pure heatmap. Returns an (H, W, 3) uint8
    array; writes a PNG when ``out_path`` is given.
    """
    alpha = check_unit_interval(alpha, "alpha")
    with Image.open(record.file_path) as img:
        original = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    height, width = original.shape[:2]
    heat = jet_colormap(upsample_bilinear(smap.grid, height, width))
    blended = (1.0 - alpha) * original + alpha * heat
    rendered = np.clip(np.rint(blended * 255.0), 0, 255).astype(np.uint8)
    if out_path is not None:
        Image.fromarray(rendered).save(Path(out_path), format="PNG")
    return rendered


def heatmap_filename(image_id: str, method: str, sign: str) -> str:
    return f"{image_id}_{method}_{sign}.png"


def overlay_filename(image_id: str, method: str, sign: str) -> str:
    return f"{image_id}_{method}_{sign}_overlay.png"


def write_heatmap(smap: SaliencyMap, out_dir, model_checkpoint: str | None = None) -> Path:
    """Export an 8-bit grayscale heatmap PNG plus its JSON sidecar.

    Pixel values are ``round(255 * value)`` of the upsampled map; the sidecar
    records provenance and the feature-grid shape.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    png_path = out_dir / heatmap_filename(smap.image_id, smap.method, smap.sign)
    gray = np.clip(np.rint(255.0 * smap.upsampled), 0, 255).astype(np.uint8)
    Image.fromarray(gray, mode="L").save(png_path, format="PNG")
    sidecar = {
        "image_id": smap.image_id,
        "attribute": smap.attribute,
        "method": smap.method,
        "model_checkpoint": model_checkpoint,
        "sign": smap.sign,
        "raw_min": smap.raw_min,
        "raw_max": smap.raw_max,
        "grid_h": int(smap.grid.shape[0]),
        "grid_w": int(smap.grid.shape[1]),
    }
    png_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return png_path
