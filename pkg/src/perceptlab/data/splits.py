"""Deterministic splitting of comparison sets."""

from __future__ import annotations

import math
import random
from typing import Sequence

from ..validation import check_fractions
from .records import Comparison, DatasetSplit


def split(
    comparisons: Sequence[Comparison],
    fractions: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
    by_image: bool = False,
) -> DatasetSplit:
    """Partition comparisons into train/validation/test, deterministically in ``seed``.

    Default mode splits by comparison (the training unit): the three parts are
    an exact partition with sizes within one of ``fraction * N``. With
    ``by_image=True`` (strict anti-leakage mode) images are partitioned
    instead, and comparisons whose endpoints fall in different image groups
    are dropped; they are returned in ``DatasetSplit.dropped`` rather than
    silently lost, so this mode does not preserve the partition property.
    """
    train_f, val_f, _ = check_fractions(fractions)
    comparisons = list(comparisons)
    n = len(comparisons)
    if n < 3:
        raise ValueError(f"need at least 3 comparisons to populate all splits, got {n}")

    rng = random.Random(seed)
    if not by_image:
        order = list(range(n))
        rng.shuffle(order)
        cut1, cut2 = _boundaries(n, train_f, val_f)
        parts = ([comparisons[i] for i in order[:cut1]],
                 [comparisons[i] for i in order[cut1:cut2]],
                 [comparisons[i] for i in order[cut2:]])
        return DatasetSplit(train=parts[0], validation=parts[1], test=parts[2], seed=seed)

    image_ids = sorted({c.left for c in comparisons} | {c.right for c in comparisons})
    rng.shuffle(image_ids)
    cut1, cut2 = _boundaries(len(image_ids), train_f, val_f)
    group = {}
    for idx, image_id in enumerate(image_ids):
        group[image_id] = 0 if idx < cut1 else (1 if idx < cut2 else 2)
    parts: tuple[list, list, list] = ([], [], [])
    dropped: list[Comparison] = []
    for comp in comparisons:
        g_left, g_right = group[comp.left], group[comp.right]
        if g_left == g_right:
            parts[g_left].append(comp)
        else:
            dropped.append(comp)
    return DatasetSplit(train=parts[0], validation=parts[1], test=parts[2], seed=seed, dropped=dropped)


def _boundaries(n: int, train_f: float, val_f: float) -> tuple[int, int]:
    # Half-up rounding of the cumulative fractions keeps every part within
    # one of fraction*n and makes exact fractions land exactly.
    cut1 = int(math.floor(train_f * n + 0.5))
    cut2 = int(math.floor((train_f + val_f) * n + 0.5))
    cut1 = max(1, min(cut1, n - 2))
    cut2 = max(cut1 + 1, min(cut2, n - 1))
    return cut1, cut2
