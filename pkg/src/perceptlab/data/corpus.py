"""Loading and validating the image manifest and pairwise-comparison CSVs."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from PIL import Image

from .records import Comparison, ImageRecord, parse_attribute

# Crowdsourcing exports sometimes carry tie/skip judgments; the ranking
# formulation admits only {-1, +1}, so these rows are dropped at ingestion.
_TIE_CHOICES = {"equal", "tie", "skip", "none", "no_preference"}

MANIFEST_COLUMNS = ("image_id", "file_path", "city")
COMPARISON_COLUMNS = ("pair_id", "left_image", "right_image", "attribute", "choice")


class CorpusError(ValueError):
    """Raised when a manifest or its referenced files violate an invariant."""


@dataclass
class RejectedRow:
    """One comparison row refused at load time, and why."""

    row: int
    reason: str

    def to_json(self) -> dict:
        return asdict(self)


def load_corpus(manifest_path) -> list[ImageRecord]:
    """Read an image manifest CSV into validated :class:`ImageRecord` objects.

    The manifest has header ``image_id,file_path,city``; file paths are
    resolved relative to the manifest's directory. Duplicate ids and missing
    files are hard errors. Image dimensions are read from the file headers.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise CorpusError(f"manifest not found: {manifest_path}")
    root = manifest_path.parent

    records: list[ImageRecord] = []
    seen: set[str] = set()
    missing: list[str] = []
    with open(manifest_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        _require_columns(reader.fieldnames, MANIFEST_COLUMNS[:2], manifest_path)
        for row in reader:
            image_id = (row["image_id"] or "").strip()
            if not image_id:
                raise CorpusError(f"{manifest_path}: empty image_id in row {reader.line_num}")
            if image_id in seen:
                raise CorpusError(f"duplicate image_id {image_id!r} in {manifest_path}")
            seen.add(image_id)
            path = root / row["file_path"].strip()
            record = ImageRecord(image_id=image_id, file_path=path, city=(row.get("city") or "").strip() or None)
            if not path.exists():
                missing.append(str(path))
            else:
                _fill_dimensions(record)
            records.append(record)
    if missing:
        raise CorpusError("manifest references missing files: " + ", ".join(missing))
    return records


def _fill_dimensions(record: ImageRecord) -> None:
    # Image.open only reads the header, so this stays cheap per record.
    try:
        with Image.open(record.file_path) as img:
            record.width, record.height = img.size
    except Exception as exc:
        raise CorpusError(f"cannot read image {record.image_id!r} at {record.file_path}: {exc}") from exc


def _require_columns(fieldnames, needed, path) -> None:
    missing = [c for c in needed if c not in fieldnames]
    if missing:
        raise CorpusError(f"{path}: missing required columns {missing}; header was {list(fieldnames)}")


def load_comparisons(
    csv_path,
    corpus: list[ImageRecord],
) -> tuple[list[Comparison], list[RejectedRow]]:
    """Read a comparison CSV, returning accepted rows and a rejection report.

    ``choice=left`` maps to outcome +1, ``choice=right`` to -1. Rows naming
    unknown image ids, pairing an image with itself, or carrying a tie/skip
    choice are rejected (noise-tolerant); an unknown attribute aborts the
    whole load since attributes are a closed set.
    """
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise CorpusError(f"comparison file not found: {csv_path}")
    known_ids = {r.image_id for r in corpus}

    comparisons: list[Comparison] = []
    rejected: list[RejectedRow] = []
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return [], []
        _require_columns(reader.fieldnames, COMPARISON_COLUMNS[1:], csv_path)
        for row in reader:
            line = reader.line_num
            attribute = parse_attribute(row["attribute"])
            left = row["left_image"].strip()
            right = row["right_image"].strip()
            unknown = [i for i in (left, right) if i not in known_ids]
            if unknown:
                rejected.append(RejectedRow(line, f"unknown image id(s): {', '.join(unknown)}"))
                continue
            if left == right:
                rejected.append(RejectedRow(line, f"left and right are the same image: {left!r}"))
                continue
            choice = row["choice"].strip().lower()
            if choice == "left":
                outcome = 1
            elif choice == "right":
                outcome = -1
            elif choice in _TIE_CHOICES:
                rejected.append(RejectedRow(line, f"tie/no-preference judgment dropped (choice={choice!r})"))
                continue
            else:
                rejected.append(RejectedRow(line, f"unrecognized choice {choice!r}"))
                continue
            comparisons.append(Comparison(left=left, right=right, attribute=attribute, outcome=outcome))
    return comparisons, rejected


def write_rejection_report(rejected: list[RejectedRow], path) -> None:
    """Persist a rejection report as a JSON list of ``{row, reason}``."""
    Path(path).write_text(json.dumps([r.to_json() for r in rejected], indent=2) + "\n", encoding="utf-8")
