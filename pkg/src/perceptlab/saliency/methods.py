"""The four CAM-family saliency methods.

All methods return a :class:`SaliencyMap` whose grid is min-max normalized
(constant raw maps collapse to all zeros) and deterministic in inference
mode. GradCAM and Ablation-CAM apply ReLU after the channel-weighted sum,
before normalization.
"""

from __future__ import annotations

import numpy as np
import torch

from ..data.preprocess import PreprocessedImage
from ..models.scorer import ScoringModel
from .capture import ActivationCapture, ablated_score
from .maps import SaliencyMap, build_map


class UnsupportedMethodError(ValueError):
    """Raised when a method is applied to a backbone family it does not cover."""


def gradcam(capture: ActivationCapture) -> SaliencyMap:
    """Gradient-weighted activation map.

    Channel weights are the spatial means of the gradients of the signed
    score with respect to the captured activations; the map is the ReLU of
    the weighted activation sum.
    """
    acts, grads = capture.spatial()
    alphas = grads.mean(axis=(1, 2))
    raw = np.maximum((alphas[:, None, None] * acts).sum(axis=0), 0.0)
    return _finish(raw, capture, "gradcam")


def gradcam_channel_weights(capture: ActivationCapture) -> np.ndarray:
    """The alpha_k channel weights GradCAM uses (exposed for verification)."""
    _, grads = capture.spatial()
    return grads.mean(axis=(1, 2))


def eigencam(capture: ActivationCapture) -> SaliencyMap:
    """Projection of activations onto their first principal direction.

    Gradient-free: works on the (positions x channels) activation matrix
    alone. The component's sign is chosen so the projected map has a
    non-negative mean before normalization.
    """
    acts, _ = capture.spatial()
    channels, h, w = acts.shape
    positions = h * w
    if positions < 2:
        raise ValueError(f"eigencam needs at least 2 spatial positions, got {positions}")
    matrix = acts.reshape(channels, positions).T
    _, _, vt = np.linalg.svd(matrix, full_matrices=False)
    projected = matrix @ vt[0]
    if projected.mean() < 0:
        projected = -projected
    return _finish(projected.reshape(h, w), capture, "eigencam")


def ablationcam(
    model: ScoringModel,
    image: PreprocessedImage | torch.Tensor,
    capture: ActivationCapture,
    eps: float = 1e-8,
) -> SaliencyMap:
    """Channel weighting by the relative score drop when each channel is zeroed.

    weight_k = (f(x) - f_k(x)) / f(x), where f_k ablates channel k at the
    capture layer; computing the weights costs exactly one extra forward pass
    per channel. The f(x) in the ratio makes the result independent of the
    capture's target sign. Requires |f(x)| > eps.
    """
    if abs(capture.score) <= eps:
        raise ValueError(
            f"|f(x)| = {abs(capture.score):.3g} <= {eps:g}: the score is too close to zero "
            "for the ablation ratio; neither the positive nor the negative sign "
            "convention can stabilize it"
        )
    weights = ablation_weights(model, image, capture)
    acts, _ = capture.spatial()
    raw = np.maximum((weights[:, None, None] * acts).sum(axis=0), 0.0)
    return _finish(raw, capture, "ablationcam")


def ablation_weights(model: ScoringModel, image, capture: ActivationCapture) -> np.ndarray:
    """The per-channel ablation weights (exposed for verification)."""
    tensor = image.tensor if isinstance(image, PreprocessedImage) else image
    channels = capture.activations.shape[-1] if capture.kind == "tokens" else capture.activations.shape[0]
    return np.array(
        [(capture.score - ablated_score(model, tensor, capture, k)) / capture.score for k in range(channels)]
    )


def rollout(attentions: list[np.ndarray]) -> np.ndarray:
    """Cumulative attention flow across layers.

    Each layer's head-averaged attention is mixed half-and-half with the
    identity (the residual path), row-normalized, and the per-layer matrices
    are left-multiplied in layer order: rollout = A_L @ ... @ A_1. The result
    stays row-stochastic.
    """
    if not attentions:
        raise ValueError("need at least one attention matrix")
    result: np.ndarray | None = None
    for attn in attentions:
        attn = np.asarray(attn, dtype=np.float64)
        if attn.ndim == 3:
            attn = attn.mean(axis=0)
        if attn.ndim != 2 or attn.shape[0] != attn.shape[1]:
            raise ValueError(f"attention matrix must be square, got shape {attn.shape}")
        mixed = 0.5 * attn + 0.5 * np.eye(attn.shape[0])
        mixed = mixed / mixed.sum(axis=1, keepdims=True)
        result = mixed if result is None else mixed @ result
    return result


def attention_rollout(capture: ActivationCapture) -> SaliencyMap:
    """Rollout saliency: the CLS row of the cumulative attention product.

    Transformer backbones only; convolutional captures carry no attention
    matrices and are rejected.
    """
    if capture.kind != "tokens" or capture.attentions is None:
        raise UnsupportedMethodError(
            "attention rollout requires a transformer backbone with captured attention matrices"
        )
    matrix = rollout(capture.attentions)
    cls_row = matrix[0, 1:]
    side = int(round(np.sqrt(cls_row.shape[0])))
    if side * side != cls_row.shape[0]:
        raise ValueError(f"patch-token count {cls_row.shape[0]} is not a square grid")
    return _finish(cls_row.reshape(side, side), capture, "attention_rollout")


def _finish(raw: np.ndarray, capture: ActivationCapture, method: str) -> SaliencyMap:
    return build_map(
        raw,
        image_id=capture.image_id,
        attribute=capture.attribute,
        method=method,
        sign=capture.target_sign,
        target_hw=capture.input_hw,
    )
