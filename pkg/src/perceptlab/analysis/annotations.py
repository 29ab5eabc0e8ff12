"""Annotation records and their append-only JSON-lines store."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

POLARITIES = ("high", "low")

_WHITESPACE = re.compile(r"\s+")


def normalize_label(label: str) -> str:
    """Trim, lowercase, and collapse internal whitespace.

    No stemming or synonym merging: labels are free-form by design, and any
    vocabulary consolidation belongs in a user-supplied mapping afterwards.
    """
    return _WHITESPACE.sub(" ", str(label).strip().lower())


def normalize_labels(labels) -> set[str]:
    """Normalized, deduplicated label set; empty strings drop out."""
    return {normalized for label in labels if (normalized := normalize_label(label))}


@dataclass
class AnnotationRecord:
    """One annotator's deduplicated object labels for one annotation task.

    ``labels`` is a set: an object counts at most once per image, however
    many times the annotator typed it.
    """

    task_id: str
    image_id: str
    attribute: str
    polarity: str
    model: str
    annotator_id: str
    labels: set[str] = field(default_factory=set)
    timestamp: str = ""

    def __post_init__(self):
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        if not isinstance(self.labels, (set, frozenset)):
            raw = list(self.labels)
            normalized = [normalize_label(l) for l in raw]
            if len(set(normalized)) != len(normalized):
                raise ValueError(
                    f"labels must form a set (an object counts once per image); got duplicates in {raw!r}"
                )
            self.labels = set(normalized)
        else:
            self.labels = {normalize_label(l) for l in self.labels}
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "image_id": self.image_id,
            "attribute": self.attribute,
            "polarity": self.polarity,
            "model": self.model,
            "annotator_id": self.annotator_id,
            "labels": sorted(self.labels),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, data: dict) -> "AnnotationRecord":
        return cls(
            task_id=data["task_id"],
            image_id=data["image_id"],
            attribute=data["attribute"],
            polarity=data["polarity"],
            model=data["model"],
            annotator_id=data["annotator_id"],
            labels=data["labels"],
            timestamp=data.get("timestamp", ""),
        )


def append_record(path, record: AnnotationRecord) -> None:
    """Append one record as a JSON line, flushing so a crash later cannot corrupt it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_json()) + "\n")
        fh.flush()


def load_records(path) -> list[AnnotationRecord]:
    """Replay a JSON-lines store into records; the store is the source of truth."""
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(AnnotationRecord.from_json(json.loads(line)))
    return records
