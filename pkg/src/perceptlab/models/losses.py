"""Ranking loss over pairwise comparisons.

For scores ``f_i`` (left) and ``f_j`` (right) and outcome ``y`` in {-1, +1},
the loss is ``max(0, margin - y * (f_i - f_j))``: zero whenever the preferred
image already scores at least ``margin`` above the other, and growing
linearly with the violation. The margin defaults to 0, so any correctly
ordered pair (ties included) is unpenalized.
"""

from __future__ import annotations

import torch

from ..validation import check_finite, check_outcome


def ranking_loss(f_i: float, f_j: float, y: int, margin: float = 0.0) -> float:
    """Hinge penalty for one comparison; >= 0, zero iff ``y*(f_i - f_j) >= margin``."""
    y = check_outcome(y)
    f_i = check_finite(f_i, "f_i")
    f_j = check_finite(f_j, "f_j")
    return max(0.0, margin - y * (f_i - f_j))


def ranking_loss_batch(
    left_scores: torch.Tensor,
    right_scores: torch.Tensor,
    outcomes: torch.Tensor,
    margin: float = 0.0,
) -> torch.Tensor:
    """Differentiable per-pair hinge losses for batched scores.

    ``outcomes`` must contain only -1 and +1; shapes must agree.
    """
    if left_scores.shape != right_scores.shape or left_scores.shape != outcomes.shape:
        raise ValueError(
            f"shape mismatch: left {tuple(left_scores.shape)}, right {tuple(right_scores.shape)}, "
            f"outcomes {tuple(outcomes.shape)}"
        )
    if not torch.all((outcomes == 1) | (outcomes == -1)):
        raise ValueError("outcomes must contain only -1 and +1")
    return torch.clamp(margin - outcomes * (left_scores - right_scores), min=0.0)
