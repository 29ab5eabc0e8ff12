"""Image preprocessing: decode, resize, normalize into model-ready tensors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import torch
from PIL import Image

from .records import ImageRecord

# Per-channel statistics of the usual large natural-image corpora; the
# conventional default when fine-tuning pretrained backbones.
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


class PreprocessError(ValueError):
    """Raised when an image cannot be decoded; carries the image id."""

    def __init__(self, image_id: str, message: str):
        super().__init__(f"cannot preprocess image {image_id!r}: {message}")
        self.image_id = image_id


@dataclass(frozen=True)
class PreprocessConfig:
    side: int = 224
    mean: tuple[float, float, float] = IMAGENET_MEAN
    std: tuple[float, float, float] = IMAGENET_STD

    def to_json(self) -> dict:
        return {"side": self.side, "mean": list(self.mean), "std": list(self.std)}

    @classmethod
    def from_json(cls, data: dict) -> "PreprocessConfig":
        return cls(side=int(data["side"]), mean=tuple(data["mean"]), std=tuple(data["std"]))


@dataclass
class PreprocessedImage:
    """A (3, side, side) float tensor plus the normalization that produced it."""

    image_id: str
    tensor: torch.Tensor
    mean: tuple[float, float, float]
    std: tuple[float, float, float]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.tensor.shape)


def preprocess(record: ImageRecord, config: PreprocessConfig = PreprocessConfig()) -> PreprocessedImage:
    """Decode, resize to ``config.side`` square, and normalize per channel.

    Deterministic: identical bytes in give an identical tensor out.
    """
    try:
        with Image.open(record.file_path) as img:
            img = img.convert("RGB")
            img = img.resize((config.side, config.side), Image.BILINEAR)
            array = np.asarray(img, dtype=np.float32) / 255.0
    except PreprocessError:
        raise
    except Exception as exc:
        raise PreprocessError(record.image_id, str(exc)) from exc

    mean = np.asarray(config.mean, dtype=np.float32)
    std = np.asarray(config.std, dtype=np.float32)
    array = (array - mean) / std
    tensor = torch.from_numpy(np.ascontiguousarray(array.transpose(2, 0, 1)))
    if not torch.isfinite(tensor).all():
        raise PreprocessError(record.image_id, "non-finite values after normalization")
    return PreprocessedImage(image_id=record.image_id, tensor=tensor, mean=config.mean, std=config.std)


class ImageTensorCache(Mapping):
    """Lazy ``image_id -> PreprocessedImage`` mapping over a corpus.

    Preprocessing is pure per item, so entries are memoized on first access.
    """

    def __init__(self, corpus: Iterable[ImageRecord], config: PreprocessConfig = PreprocessConfig()):
        self.records = {r.image_id: r for r in corpus}
        self.config = config
        self._cache: dict[str, PreprocessedImage] = {}

    def __getitem__(self, image_id: str) -> PreprocessedImage:
        if image_id not in self._cache:
            self._cache[image_id] = preprocess(self.records[image_id], self.config)
        return self._cache[image_id]

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)
