"""Region statistics over saliency heatmaps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..saliency.maps import SaliencyMap
from ..validation import check_unit_interval


@dataclass
class HeatmapStats:
    """How much of the image a heatmap activates, and in how many regions.

    Quantifies the qualitative contrast between backbones: convolutional
    models tend to light up a few small areas, transformers larger ones.
    """

    image_id: str
    method: str
    activated_fraction: float
    component_count: int


def heatmap_stats(smap: SaliencyMap, threshold: float = 0.5) -> HeatmapStats:
    """Fraction of upsampled pixels at or above ``threshold`` plus the number
    of 4-connected regions they form."""
    threshold = check_unit_interval(threshold, "threshold", open_ends=True)
    mask = smap.upsampled >= threshold
    fraction = float(mask.mean())
    if mask.any():
        # Default scipy structure is the 4-connected cross.
        _, count = ndimage.label(mask)
    else:
        count = 0
    return HeatmapStats(
        image_id=smap.image_id,
        method=smap.method,
        activated_fraction=fraction,
        component_count=int(count),
    )
