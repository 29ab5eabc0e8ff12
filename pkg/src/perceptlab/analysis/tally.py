"""Aggregation of annotation records into object tally tables."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .annotations import AnnotationRecord

TableKey = tuple[str, str, str]  # (attribute, polarity, model)


@dataclass
class TallyTable:
    """Object-label counts for one (attribute, polarity, model) combination.

    A label's count is the number of distinct images whose record contains
    it; rows are ordered by count descending then label ascending.
    """

    attribute: str
    polarity: str
    model: str
    rows: list[tuple[str, int]]

    def to_json(self) -> dict:
        return {
            "attribute": self.attribute,
            "polarity": self.polarity,
            "model": self.model,
            "rows": [{"object": label, "count": count} for label, count in self.rows],
        }


def tally(records: Iterable[AnnotationRecord]) -> dict[TableKey, TallyTable]:
    """Aggregate records into one TallyTable per (attribute, polarity, model).

    Order-insensitive in the input records. Aggregating across several
    annotators still counts distinct images, but emits a warning listing the
    annotator ids since mixed-annotator tallies conflate judgment styles.
    """
    records = list(records)
    annotators = sorted({r.annotator_id for r in records})
    if len(annotators) > 1:
        warnings.warn(
            f"tally aggregates records from {len(annotators)} annotators: {', '.join(annotators)}",
            stacklevel=2,
        )
    images_per_label: dict[TableKey, dict[str, set[str]]] = {}
    for record in records:
        key = (record.attribute, record.polarity, record.model)
        per_label = images_per_label.setdefault(key, {})
        for label in record.labels:
            per_label.setdefault(label, set()).add(record.image_id)
    tables = {}
    for key in sorted(images_per_label):
        counts = {label: len(ids) for label, ids in images_per_label[key].items()}
        rows = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        tables[key] = TallyTable(attribute=key[0], polarity=key[1], model=key[2], rows=rows)
    return tables


def export_table(table: TallyTable, fmt: str = "csv") -> str:
    """Render one table as CSV or Markdown text; byte-deterministic."""
    if fmt == "csv":
        lines = ["object,count"] + [f"{label},{count}" for label, count in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        sign = "+" if table.polarity == "high" else "-"
        lines = [
            f"### {table.attribute} ({sign}) — {table.model}",
            "",
            "| object | count |",
            "| --- | --- |",
        ]
        lines += [f"| {label} | {count} |" for label, count in table.rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"format must be 'csv' or 'markdown', got {fmt!r}")


def export_markdown_grid(tables: dict[TableKey, TallyTable], attributes: Sequence[str] | None = None) -> str:
    """Render attribute blocks side by side, with +/- columns per attribute.

    One Markdown table whose header carries a block per attribute and
    polarity; rows are padded with blanks where a block runs short.
    """
    if attributes is None:
        attributes = sorted({key[0] for key in tables})
    blocks: list[tuple[str, str, list[tuple[str, int]]]] = []
    for attribute in attributes:
        for polarity, sign in (("high", "+"), ("low", "-")):
            rows = []
            for (attr, pol, _model), table in sorted(tables.items()):
                if attr == attribute and pol == polarity:
                    rows = table.rows
            blocks.append((attribute, sign, rows))

    header = []
    for attribute, sign, _rows in blocks:
        header += [f"{attribute} {sign}", "count"]
    depth = max((len(rows) for _, _, rows in blocks), default=0)
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for i in range(depth):
        cells = []
        for _, _, rows in blocks:
            if i < len(rows):
                cells += [rows[i][0], str(rows[i][1])]
            else:
                cells += ["", ""]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def save_tables(tables: dict[TableKey, TallyTable], out_dir, fmt: str = "csv") -> list[Path]:
    """Write one file per table, named ``{attribute}_{polarity}_{model}.{ext}``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "md"
    written = []
    for (attribute, polarity, model), table in sorted(tables.items()):
        path = out_dir / f"{attribute}_{polarity}_{model}.{ext}"
        path.write_text(export_table(table, fmt), encoding="utf-8")
        written.append(path)
    return written
