from .backbones import (
    BACKBONE_KINDS,
    BackboneConfig,
    ResNetBackbone,
    SelfAttention,
    TinyConv,
    VisionTransformer,
    build_backbone,
)
from .losses import ranking_loss, ranking_loss_batch
from .metrics import evaluate_comparisons, pairwise_accuracy, score_images
from .pairs import PairBatch, collate_pairs
from .scorer import ScoringModel, build_model

__all__ = [
    "BACKBONE_KINDS",
    "BackboneConfig",
    "PairBatch",
    "ResNetBackbone",
    "ScoringModel",
    "SelfAttention",
    "TinyConv",
    "VisionTransformer",
    "build_backbone",
    "build_model",
    "collate_pairs",
    "evaluate_comparisons",
    "pairwise_accuracy",
    "ranking_loss",
    "ranking_loss_batch",
    "score_images",
]
