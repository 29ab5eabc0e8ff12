from .corpus import CorpusError, RejectedRow, load_comparisons, load_corpus, write_rejection_report
from .preprocess import (
    IMAGENET_MEAN,
    IMAGENET_STD,
    ImageTensorCache,
    PreprocessConfig,
    PreprocessedImage,
    PreprocessError,
    preprocess,
)
from .records import Comparison, DatasetSplit, ImageRecord, PerceptualAttribute, parse_attribute
from .splits import split

__all__ = [
    "Comparison",
    "CorpusError",
    "DatasetSplit",
    "IMAGENET_MEAN",
    "IMAGENET_STD",
    "ImageRecord",
    "ImageTensorCache",
    "PerceptualAttribute",
    "PreprocessConfig",
    "PreprocessedImage",
    "PreprocessError",
    "RejectedRow",
    "load_comparisons",
    "load_corpus",
    "parse_attribute",
    "preprocess",
    "split",
    "write_rejection_report",
]
