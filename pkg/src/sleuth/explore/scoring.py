"""Data-property-driven chart-type scoring.

Scores come from a fixed rule table over column semantic classes and
distinct-value counts, so the ranking is a pure function of the dataset
description.  Ties break in a fixed preference order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidArguments

V_TYPES = ("table", "barChart", "pieChart", "heatmap", "multiTimePlot",
           "labeledGraph", "topicView")

# Fixed tie-break preference, most specific chart first.
TIE_ORDER = ("multiTimePlot", "heatmap", "barChart", "pieChart", "labeledGraph",
             "topicView", "table")

PIE_SLICE_CAP = 8
BAR_CATEGORY_CAP = 50

_CATEGORICAL_LIKE = {"categorical", "identifier"}
_NUMERIC_LIKE = {"continuous", "ordinal"}


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    semantic_class: str
    distinct: int


@dataclass(frozen=True)
class DatasetDescription:
    model: str  # relational | graph | timeseries | matrix | document
    columns: tuple[ColumnProfile, ...] = field(default_factory=tuple)


def score_representations(description: DatasetDescription) -> list[tuple[str, float]]:
    """Ranked (vType, score) pairs over all chart types; the table baseline
    keeps every dataset displayable."""
    if description.model == "relational" and not description.columns:
        raise InvalidArguments("a relational description needs at least one column")
    cols = description.columns
    categorical = [c for c in cols if c.semantic_class in _CATEGORICAL_LIKE]
    numeric = [c for c in cols if c.semantic_class in _NUMERIC_LIKE]
    temporal = [c for c in cols if c.semantic_class == "temporal"]

    scores = {v: 0.0 for v in V_TYPES}
    scores["table"] = 0.1

    if description.model == "timeseries" or (temporal and numeric):
        scores["multiTimePlot"] = 0.9
    if description.model == "relational":
        if len(categorical) >= 2 and numeric:
            scores["heatmap"] = 0.9
        if any(c.distinct <= BAR_CATEGORY_CAP for c in categorical) and numeric:
            scores["barChart"] = 0.7
        if any(c.distinct <= PIE_SLICE_CAP for c in categorical) and numeric:
            scores["pieChart"] = 0.5
    if description.model == "graph":
        scores["labeledGraph"] = 0.9
    if description.model in ("matrix", "document"):
        scores["topicView"] = 0.9

    rank = {v: i for i, v in enumerate(TIE_ORDER)}
    return sorted(scores.items(), key=lambda kv: (-kv[1], rank[kv[0]]))
