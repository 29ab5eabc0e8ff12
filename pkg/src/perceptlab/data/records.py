"""Core dataset records: images, perceptual attributes, pairwise comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..validation import check_outcome


class PerceptualAttribute(str, Enum):
    """The six crowd-judged qualities a comparison can be about."""

    SAFETY = "safety"
    WEALTHY = "wealthy"
    DEPRESSING = "depressing"
    LIVELY = "lively"
    BORING = "boring"
    BEAUTIFUL = "beautiful"

    def __str__(self) -> str:  # pragma: no cover - repr sugar
        return self.value


def parse_attribute(name) -> PerceptualAttribute:
    """Resolve an attribute name, raising with the legal set on failure."""
    if isinstance(name, PerceptualAttribute):
        return name
    try:
        return PerceptualAttribute(str(name).strip().lower())
    except ValueError:
        allowed = ", ".join(a.value for a in PerceptualAttribute)
        raise ValueError(f"unknown attribute {name!r}; expected one of: {allowed}") from None


@dataclass
class ImageRecord:
    """One street-level image in the corpus."""

    image_id: str
    file_path: Path
    city: str | None = None
    width: int = 0
    height: int = 0

    def __post_init__(self):
        self.file_path = Path(self.file_path)


@dataclass(frozen=True)
class Comparison:
    """One crowdsourced judgment: which of two images better fits an attribute.

    ``outcome`` is +1 when the left image was preferred, -1 for the right.
    """

    left: str
    right: str
    attribute: PerceptualAttribute
    outcome: int

    def __post_init__(self):
        object.__setattr__(self, "outcome", check_outcome(self.outcome))
        if self.left == self.right:
            raise ValueError(f"comparison endpoints must differ, got {self.left!r} twice")


@dataclass
class DatasetSplit:
    """Deterministic train/validation/test partition of a comparison set."""

    train: list[Comparison]
    validation: list[Comparison]
    test: list[Comparison]
    seed: int
    dropped: list[Comparison] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train) + len(self.validation) + len(self.test)
