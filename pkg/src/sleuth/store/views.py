"""Materialized view definitions and their expression evaluators.

A view's ``source`` is a small declarative expression dict; the expression
decides which in-memory model the result lands in, and the definition's
``target_model`` must agree with it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import InvalidViewDef
from .graph import PropertyGraph
from .graphmap import GraphMappingSpec, build_graph_from_relation
from .tables import Table
from .timeseries import TimeSeries, bucket_counts

TARGET_MODELS = ("relational", "graph", "timeseries", "matrix")


@dataclass
class Matrix:
    name: str
    row_labels: list[str]
    col_labels: list[str]
    values: list[list[float]]


@dataclass
class MaterializedViewDef:
    view_id: str
    source: dict
    target_model: str
    description: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "MaterializedViewDef":
        missing = {"view_id", "source", "target_model"} - set(data)
        if missing:
            raise InvalidViewDef(f"view definition missing fields: {sorted(missing)}")
        return cls(data["view_id"], data["source"], data["target_model"],
                   data.get("description", ""))


_EXPR_MODELS = {
    "time_bucket_count": "timeseries",
    "group_count": "relational",
    "pair_count": "relational",
    "pair_count_matrix": "matrix",
    "select": "relational",
    "graph_map": "graph",
}


def validate_view_def(vdef: MaterializedViewDef, tables: dict[str, Table]) -> None:
    if vdef.target_model not in TARGET_MODELS:
        raise InvalidViewDef(f"unknown target model {vdef.target_model!r}")
    expr = vdef.source.get("expr") if isinstance(vdef.source, dict) else None
    if expr not in _EXPR_MODELS:
        raise InvalidViewDef(f"unknown view expression {expr!r}")
    if _EXPR_MODELS[expr] != vdef.target_model:
        raise InvalidViewDef(
            f"expression {expr!r} produces {_EXPR_MODELS[expr]}, not {vdef.target_model}")
    if expr == "graph_map":
        if "mapping" not in vdef.source:
            raise InvalidViewDef("graph_map requires a 'mapping' field")
        return
    table_name = vdef.source.get("table")
    if table_name not in tables:
        raise InvalidViewDef(f"view references missing table {table_name!r}")
    table = tables[table_name]
    have = set(table.column_names())
    referenced = []
    if expr == "time_bucket_count":
        referenced = [vdef.source.get("time_column", "created_at")]
    elif expr == "group_count":
        referenced = list(vdef.source.get("by", []))
        if not referenced:
            raise InvalidViewDef("group_count requires 'by' columns")
    elif expr in ("pair_count", "pair_count_matrix"):
        referenced = [vdef.source.get("group_column"), vdef.source.get("value_column")]
    elif expr == "select":
        referenced = list(vdef.source.get("columns", []))
    for col in referenced:
        if col not in have:
            raise InvalidViewDef(f"view references missing column {col!r} of {table_name}")


def compute_view(vdef: MaterializedViewDef, tables: dict[str, Table]):
    expr = vdef.source["expr"]
    if expr == "time_bucket_count":
        return _time_bucket_count(vdef, tables)
    if expr == "group_count":
        return _group_count(vdef, tables)
    if expr == "pair_count":
        return _pair_count(vdef, tables)
    if expr == "pair_count_matrix":
        return _pair_count_matrix(vdef, tables)
    if expr == "select":
        return _select(vdef, tables)
    if expr == "graph_map":
        mapping = GraphMappingSpec.from_dict(vdef.source["mapping"])
        return build_graph_from_relation(mapping, tables)
    raise InvalidViewDef(f"unknown view expression {expr!r}")


def _time_bucket_count(vdef, tables) -> TimeSeries:
    src = vdef.source
    table = tables[src["table"]]
    col = src.get("time_column", "created_at")
    granularity = src.get("granularity", "hour")
    return bucket_counts(table.values(col), granularity, name=vdef.view_id)


def _group_count(vdef, tables) -> Table:
    src = vdef.source
    table = tables[src["table"]]
    by = list(src["by"])
    renames = src.get("as", {})
    count_col = src.get("count_column", "count")
    idx = [table.col_index(c) for c in by]
    counts: dict[tuple, int] = {}
    for row in table.rows:
        key = tuple(row[i] for i in idx)
        counts[key] = counts.get(key, 0) + 1
    columns = [(renames.get(c, c), table.column_class(c)) for c in by]
    columns.append((count_col, "continuous"))
    rows = [(*key, counts[key]) for key in sorted(counts, key=lambda k: tuple(map(str, k)))]
    return Table(vdef.view_id, columns, rows)


def _pair_count(vdef, tables) -> Table:
    counts = _pair_counts(vdef, tables)
    a, b = vdef.source.get("pair_names", ("value_a", "value_b"))
    rows = [(x, y, n) for (x, y), n in sorted(counts.items())]
    return Table(vdef.view_id,
                 [(a, "categorical"), (b, "categorical"), ("count", "continuous")], rows)


def _pair_counts(vdef, tables) -> dict[tuple[str, str], int]:
    src = vdef.source
    table = tables[src["table"]]
    gi = table.col_index(src["group_column"])
    vi = table.col_index(src["value_column"])
    groups: dict[str, set] = {}
    for row in table.rows:
        groups.setdefault(row[gi], set()).add(row[vi])
    counts: dict[tuple[str, str], int] = {}
    for values in groups.values():
        ordered = sorted(values)
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                pair = (ordered[i], ordered[j])
                counts[pair] = counts.get(pair, 0) + 1
    return counts


def _pair_count_matrix(vdef, tables) -> Matrix:
    counts = _pair_counts(vdef, tables)
    labels = sorted({v for pair in counts for v in pair})
    max_terms = vdef.source.get("max_terms")
    if max_terms:
        totals = {lab: 0 for lab in labels}
        for (x, y), n in counts.items():
            totals[x] += n
            totals[y] += n
        labels = sorted(sorted(labels, key=lambda l: -totals[l])[:max_terms])
    pos = {lab: i for i, lab in enumerate(labels)}
    values = [[0.0] * len(labels) for _ in labels]
    for (x, y), n in counts.items():
        if x in pos and y in pos:
            values[pos[x]][pos[y]] = float(n)
            values[pos[y]][pos[x]] = float(n)
    return Matrix(vdef.view_id, list(labels), list(labels), values)


def _select(vdef, tables) -> Table:
    src = vdef.source
    table = tables[src["table"]]
    columns = list(src.get("columns") or table.column_names())
    limit = src.get("limit")
    idx = [table.col_index(c) for c in columns]
    rows = [tuple(row[i] for i in idx) for row in table.rows]
    if limit is not None:
        rows = rows[: int(limit)]
    cols = [(c, table.column_class(c)) for c in columns]
    return Table(vdef.view_id, cols, rows)


@dataclass
class RefreshReport:
    entries: list[dict] = field(default_factory=list)
    duration_ms: float = 0.0

    def add(self, view_id: str, model: str, size: int, duration_ms: float) -> None:
        self.entries.append({
            "view_id": view_id, "target_model": model,
            "size": size, "duration_ms": duration_ms,
        })


def result_size(result) -> int:
    if isinstance(result, Table):
        return len(result.rows)
    if isinstance(result, TimeSeries):
        return len(result.points)
    if isinstance(result, PropertyGraph):
        return result.node_count() + result.edge_count()
    if isinstance(result, Matrix):
        return len(result.row_labels) * len(result.col_labels)
    return 0


def refresh_timer():
    return time.perf_counter()
