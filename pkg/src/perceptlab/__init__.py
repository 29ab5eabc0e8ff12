"""perceptlab: train, explain, and annotate urban-perception scoring models."""

from .data import (
    Comparison,
    DatasetSplit,
    ImageRecord,
    ImageTensorCache,
    PerceptualAttribute,
    PreprocessConfig,
    PreprocessedImage,
    load_comparisons,
    load_corpus,
    preprocess,
    split,
)
from .models import (
    BackboneConfig,
    ScoringModel,
    build_model,
    pairwise_accuracy,
    ranking_loss,
    score_images,
)
from .ranker import PairwiseRanker
from .training import TrainConfig, TrainReport, evaluate, load_checkpoint, save_checkpoint, train

__version__ = "0.1.0"

__all__ = [
    "BackboneConfig",
    "Comparison",
    "DatasetSplit",
    "ImageRecord",
    "ImageTensorCache",
    "PairwiseRanker",
    "PerceptualAttribute",
    "PreprocessConfig",
    "PreprocessedImage",
    "ScoringModel",
    "TrainConfig",
    "TrainReport",
    "build_model",
    "evaluate",
    "load_checkpoint",
    "load_comparisons",
    "load_corpus",
    "pairwise_accuracy",
    "preprocess",
    "ranking_loss",
    "save_checkpoint",
    "score_images",
    "split",
    "train",
]
