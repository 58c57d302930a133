"""Cross-model operations: graph/relational merge, similarity join, top-k."""

from __future__ import annotations

import math

from ..errors import ColumnNotNumeric, InvalidArguments, InvalidJoinSpec, StaleIndex
from ..store.graph import PropertyGraph
from ..store.tables import NUMERIC_CLASSES, Table
from ..xindex import EdgeRecordIndex


def merge_graph_relational(graph: PropertyGraph, table: Table, index: EdgeRecordIndex,
                           projection: list[str], expected_version: int | None = None
                           ) -> PropertyGraph:
    """Copy the graph, attaching projected row values to each edge.

    When an edge maps to several rows the lowest row ordinal wins for scalar
    columns; the mapped row count is always attached as ``rec_count``.
    """
    if expected_version is not None and index.store_version != expected_version:
        raise StaleIndex(f"edge-record index built at version {index.store_version}, "
                         f"store is at {expected_version}")
    if index.table_name != table.name:
        raise InvalidJoinSpec(
            f"index joins table {index.table_name!r}, got {table.name!r}")
    for col in projection:
        if col not in table.column_names():
            raise InvalidJoinSpec(f"projection column {col!r} not in table {table.name!r}")
    idx = [(c, table.col_index(c)) for c in projection]
    merged = PropertyGraph(directed=graph.directed)
    for nid in sorted(graph.nodes):
        n = graph.nodes[nid]
        merged.add_node(n.node_id, n.label, n.props)
    for eid in graph.edges:
        e = graph.edges[eid]
        props = dict(e.props)
        refs = sorted(index.records_for(eid), key=lambda r: r[1])
        props["rec_count"] = len(refs)
        if refs:
            first_row = table.rows[refs[0][1]]
            for col, ci in idx:
                props[col] = first_row[ci]
        merged.add_edge(e.source, e.target, e.label, props, edge_id=e.edge_id)
    return merged


def cosine(u: dict[str, float], v: dict[str, float]) -> float:
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v[t] for t, w in u.items() if t in v)
    return dot / (nu * nv)


def similarity_join(left, right, threshold: float) -> list[tuple[str, str, float]]:
    """All pairs with cosine >= threshold, descending cosine, ties by id pair."""
    out = []
    for lid, lvec in left:
        for rid, rvec in right:
            c = cosine(lvec, rvec)
            if c >= threshold:
                out.append((lid, rid, c))
    out.sort(key=lambda p: (-p[2], p[0], p[1]))
    return out


def topk(table: Table, column: str, k: int, descending: bool = True) -> Table:
    """First k rows under a stable sort on one numeric column."""
    cls = table.column_class(column)
    ci = table.col_index(column)
    if cls not in NUMERIC_CLASSES:
        values = [row[ci] for row in table.rows]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise ColumnNotNumeric(f"column {column!r} has class {cls} and "
                                   "non-numeric values")
    if k < 1:
        raise InvalidArguments(f"k must be >= 1, got {k}")
    ordered = sorted(table.rows, key=lambda row: -row[ci] if descending else row[ci])
    return Table(table.name, list(table.columns), ordered[:k])
