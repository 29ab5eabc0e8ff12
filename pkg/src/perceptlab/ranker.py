"""Estimator-style facade over the training pipeline.

``PairwiseRanker`` follows the scikit-learn conventions (constructor stores
hyperparameters untouched, ``fit`` returns self, fitted state carries a
trailing underscore, ``get_params``/``set_params`` inherited), so the
ranking model slots into ecosystem tooling alongside its native API.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
import torch
from sklearn.base import BaseEstimator

from .data.preprocess import PreprocessedImage
from .data.records import Comparison, DatasetSplit, parse_attribute
from .data.splits import split as split_comparisons
from .models.metrics import evaluate_comparisons, score_images
from .models.scorer import build_model
from .training.config import TrainConfig
from .training.trainer import train as run_training


class PairwiseRanker(BaseEstimator):
    """Scalar attribute scorer trained on pairwise comparisons.

    Parameters mirror the training configuration; ``fit`` consumes a list of
    :class:`Comparison` plus an ``image_id -> PreprocessedImage`` mapping,
    ``predict`` returns scores, and ``score`` is pairwise accuracy (higher
    is better, as the scikit-learn convention expects).
    """

    def __init__(
        self,
        backbone: str = "tiny_conv",
        attribute: str = "safety",
        learning_rate: float = 1e-3,
        epochs: int = 20,
        batch_size: int = 32,
        seed: int = 0,
        pretrained: bool = False,
        optimizer_kind: str = "sgd",
        momentum: float = 0.9,
        validation_fraction: float = 0.1,
    ):
        self.backbone = backbone
        self.attribute = attribute
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.pretrained = pretrained
        self.optimizer_kind = optimizer_kind
        self.momentum = momentum
        self.validation_fraction = validation_fraction

    def fit(self, comparisons: Sequence[Comparison], images: Mapping[str, PreprocessedImage]):
        comparisons = list(comparisons)
        if not comparisons:
            raise ValueError("cannot fit on an empty comparison list")
        config = TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
            pretrained=self.pretrained,
            optimizer_kind=self.optimizer_kind,
            momentum=self.momentum,
        )
        holdout = max(min(self.validation_fraction, 0.5), 1.0 / max(len(comparisons), 2))
        data_split: DatasetSplit = split_comparisons(
            comparisons,
            (1.0 - 2 * holdout, holdout, holdout),
            seed=self.seed,
        )
        self.model_ = build_model(self.backbone, parse_attribute(self.attribute), pretrained=self.pretrained)
        self.report_ = run_training(self.model_, data_split, images, config)
        return self

    def predict(self, images: Mapping[str, PreprocessedImage] | Sequence[PreprocessedImage]) -> np.ndarray:
        """Attribute scores for the given images, in iteration order."""
        self._check_fitted()
        if isinstance(images, Mapping):
            scores = score_images(self.model_, images)
            return np.array([scores[i] for i in images])
        tensors = torch.stack([img.tensor for img in images])
        self.model_.eval()
        with torch.no_grad():
            return self.model_(tensors).numpy()

    def score(self, comparisons: Sequence[Comparison], images: Mapping[str, PreprocessedImage]) -> float:
        """Pairwise accuracy on held-out comparisons."""
        self._check_fitted()
        return evaluate_comparisons(self.model_, comparisons, images)

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise RuntimeError("this PairwiseRanker is not fitted yet; call fit first")
