from .capture import ActivationCapture, LayerNotFoundError, ablated_score, capture
from .maps import SALIENCY_METHODS, SIGNS, SaliencyMap, build_map, minmax_normalize, upsample_bilinear
from .methods import (
    UnsupportedMethodError,
    ablation_weights,
    ablationcam,
    attention_rollout,
    eigencam,
    gradcam,
    gradcam_channel_weights,
    rollout,
)
from .overlay import (
    heatmap_filename,
    jet_colormap,
    overlay_filename,
    upsample_and_overlay,
    write_heatmap,
)

__all__ = [
    "ActivationCapture",
    "LayerNotFoundError",
    "SALIENCY_METHODS",
    "SIGNS",
    "SaliencyMap",
    "UnsupportedMethodError",
    "ablated_score",
    "ablation_weights",
    "ablationcam",
    "attention_rollout",
    "build_map",
    "capture",
    "eigencam",
    "gradcam",
    "gradcam_channel_weights",
    "heatmap_filename",
    "jet_colormap",
    "minmax_normalize",
    "overlay_filename",
    "rollout",
    "upsample_and_overlay",
    "upsample_bilinear",
    "write_heatmap",
]
