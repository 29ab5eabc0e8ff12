"""The scalar scoring model: backbone features pooled into one linear unit."""

from __future__ import annotations

import math

import torch
from torch import nn

from ..data.preprocess import PreprocessedImage
from ..data.records import PerceptualAttribute, parse_attribute
from .backbones import BackboneConfig, build_backbone


class ScoringModel(nn.Module):
    """Maps an image to a single real attribute score.

    The head is one linear unit with no activation on the backbone's pooled
    representation (global average pool for convolutional backbones, the CLS
    token for the transformer). The same parameters score both members of a
    comparison pair; pair handling lives in the loss, not the network.
    """

    def __init__(self, backbone_config: BackboneConfig, attribute: PerceptualAttribute):
        super().__init__()
        self.backbone_config = backbone_config
        self.backbone_kind = backbone_config.kind
        self.attribute = parse_attribute(attribute)
        self.backbone = build_backbone(backbone_config)
        self.head = nn.Linear(self.backbone.feature_dim, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != 3:
            raise ValueError(f"expected input of shape (batch, 3, H, W), got {tuple(x.shape)}")
        return self.head(self.backbone(x)).squeeze(-1)

    @torch.no_grad()
    def score(self, image: PreprocessedImage | torch.Tensor) -> float:
        """Inference-mode scalar score for a single image."""
        tensor = image.tensor if isinstance(image, PreprocessedImage) else image
        was_training = self.training
        self.eval()
        try:
            value = float(self(tensor.unsqueeze(0))[0])
        finally:
            self.train(was_training)
        if not math.isfinite(value):
            raise RuntimeError(f"non-finite score {value!r} for image input")
        return value

    @property
    def capture_module(self) -> nn.Module:
        return self.backbone.capture_module

    @property
    def capture_kind(self) -> str:
        return self.backbone.capture_kind


def build_model(
    backbone: str = "tiny_conv",
    attribute: PerceptualAttribute | str = PerceptualAttribute.SAFETY,
    pretrained: bool = False,
    **overrides,
) -> ScoringModel:
    """Convenience constructor from a backbone kind name."""
    config = BackboneConfig(kind=backbone, pretrained=pretrained, **overrides)
    return ScoringModel(config, parse_attribute(attribute))
