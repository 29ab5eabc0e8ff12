from .checkpoint import load_checkpoint, save_checkpoint
from .config import TrainConfig
from .trainer import EpochEntry, TrainReport, evaluate, train

__all__ = [
    "EpochEntry",
    "TrainConfig",
    "TrainReport",
    "evaluate",
    "load_checkpoint",
    "save_checkpoint",
    "train",
]
