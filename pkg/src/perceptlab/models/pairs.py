"""Batched comparison pairs ready for the shared-weight forward passes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import torch

from ..data.preprocess import PreprocessedImage
from ..data.records import Comparison


@dataclass
class PairBatch:
    """Left/right image tensors plus outcomes for one training batch.

    One scoring model evaluates both sides; the pair structure lives here
    and in the loss, never in the network.
    """

    left: torch.Tensor
    right: torch.Tensor
    outcomes: torch.Tensor

    def __post_init__(self):
        if not (len(self.left) == len(self.right) == len(self.outcomes)):
            raise ValueError(
                f"batch lengths differ: left {len(self.left)}, right {len(self.right)}, "
                f"outcomes {len(self.outcomes)}"
            )
        if not torch.all((self.outcomes == 1) | (self.outcomes == -1)):
            raise ValueError("outcomes must contain only -1 and +1")

    def __len__(self) -> int:
        return len(self.outcomes)


def collate_pairs(
    comparisons: Sequence[Comparison],
    images: Mapping[str, PreprocessedImage],
) -> PairBatch:
    """Stack the referenced images of a comparison batch into tensors."""
    return PairBatch(
        left=torch.stack([images[c.left].tensor for c in comparisons]),
        right=torch.stack([images[c.right].tensor for c in comparisons]),
        outcomes=torch.tensor([c.outcome for c in comparisons], dtype=torch.float32),
    )
