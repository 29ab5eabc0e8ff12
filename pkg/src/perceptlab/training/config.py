"""Training configuration."""

from __future__ import annotations

from dataclasses import dataclass

OPTIMIZER_KINDS = ("sgd", "adam")


@dataclass
class TrainConfig:
    """Transfer-learning hyperparameters.

    Defaults: fine-tune all layers with plain SGD (momentum 0.9) at a small
    learning rate of 1e-3 for 20 epochs. ``shuffle=False`` fixes the batch
    order across epochs, which some determinism tests rely on.
    """

    learning_rate: float = 1e-3
    epochs: int = 20
    batch_size: int = 32
    seed: int = 0
    pretrained: bool = True
    optimizer_kind: str = "sgd"
    momentum: float = 0.9
    shuffle: bool = True

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.optimizer_kind not in OPTIMIZER_KINDS:
            raise ValueError(f"optimizer_kind must be one of {OPTIMIZER_KINDS}, got {self.optimizer_kind!r}")

    def to_json(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "pretrained": self.pretrained,
            "optimizer_kind": self.optimizer_kind,
            "momentum": self.momentum,
            "shuffle": self.shuffle,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrainConfig":
        return cls(**data)
