from .annotations import (
    POLARITIES,
    AnnotationRecord,
    append_record,
    load_records,
    normalize_label,
    normalize_labels,
)
from .ranking import RankedCorpus, extremes, load_extremes, rank_corpus, rank_from_scores, write_extremes
from .stats import HeatmapStats, heatmap_stats
from .tally import TallyTable, export_markdown_grid, export_table, save_tables, tally

__all__ = [
    "AnnotationRecord",
    "HeatmapStats",
    "POLARITIES",
    "RankedCorpus",
    "TallyTable",
    "append_record",
    "export_markdown_grid",
    "export_table",
    "extremes",
    "heatmap_stats",
    "load_extremes",
    "load_records",
    "normalize_label",
    "normalize_labels",
    "rank_corpus",
    "rank_from_scores",
    "save_tables",
    "tally",
    "write_extremes",
]
