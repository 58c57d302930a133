"""Cross-model join indexes.

Three structures connect the in-memory models: an edge-to-record map between
graph and relational data, a dense-subgraph-to-term-vector map between graph
and text data, and a year/month/day/hour hierarchy over temporal data.
Indexes are immutable once built and carry the store version they were built
against; the query engine treats a version mismatch as staleness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import InvalidInterval, InvalidJoinSpec
from .store.graph import PropertyGraph
from .store.tables import Table
from .store.textindex import InvertedIndex

RecordRef = tuple[str, int]  # (table name, row ordinal)


# --- edge -> record index -------------------------------------------------


@dataclass
class EdgeRecordIndex:
    edge_to_records: dict[str, frozenset[RecordRef]]
    table_name: str
    edge_property: str
    column: str
    store_version: int = -1

    def records_for(self, edge_id: str) -> frozenset[RecordRef]:
        return self.edge_to_records.get(edge_id, frozenset())


def build_edge_record_index(graph: PropertyGraph, table: Table,
                            edge_property: str, column: str,
                            store_version: int = -1) -> EdgeRecordIndex:
    """Map each edge to the rows whose `column` equals the edge's property."""
    if column not in table.column_names():
        raise InvalidJoinSpec(f"table {table.name!r} has no column {column!r}")
    if not any(edge_property in e.props for e in graph.edges.values()) and graph.edges:
        raise InvalidJoinSpec(f"no edge carries property {edge_property!r}")
    ci = table.col_index(column)
    by_value: dict[object, list[RecordRef]] = {}
    for ordinal, row in enumerate(table.rows):
        by_value.setdefault(row[ci], []).append((table.name, ordinal))
    mapping = {}
    for edge_id, edge in graph.edges.items():
        if edge_property in edge.props:
            mapping[edge_id] = frozenset(by_value.get(edge.props[edge_property], ()))
        else:
            mapping[edge_id] = frozenset()
    return EdgeRecordIndex(mapping, table.name, edge_property, column, store_version)


# --- dense subgraphs and their term vectors -----------------------------------


def k_core_nodes(graph: PropertyGraph, k: int) -> set[str]:
    """Maximal subgraph with every degree >= k; direction ignored,
    multi-edges counted once."""
    adj = graph.adjacency()
    degree = {n: len(adj[n]) for n in adj}
    removed: set[str] = set()
    queue = [n for n, d in degree.items() if d < k]
    while queue:
        n = queue.pop()
        if n in removed:
            continue
        removed.add(n)
        for m in adj[n]:
            if m not in removed:
                degree[m] -= 1
                if degree[m] < k:
                    queue.append(m)
    return set(adj) - removed


def dense_subgraphs(graph: PropertyGraph, k: int) -> list[set[str]]:
    """Connected components of the k-core, ordered by smallest member id."""
    core = k_core_nodes(graph, k)
    adj = graph.adjacency()
    components: list[set[str]] = []
    seen: set[str] = set()
    for start in sorted(core):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            n = stack.pop()
            for m in adj[n]:
                if m in core and m not in seen:
                    seen.add(m)
                    comp.add(m)
                    stack.append(m)
        components.append(comp)
    components.sort(key=lambda c: min(c))
    return components


@dataclass
class SubgraphTermIndex:
    entries: list[dict] = field(default_factory=list)  # {subgraph_id, nodes, vector}
    k: int = 3
    store_version: int = -1


def build_subgraph_term_index(graph: PropertyGraph, k: int,
                              doc_attachment: dict[str, list[str]],
                              index: InvertedIndex,
                              store_version: int = -1) -> SubgraphTermIndex:
    """One entry per dense subgraph; its term vector is the unit-normalized
    tf-idf sum of all documents attached to the subgraph's nodes."""
    for node_id, doc_ids in doc_attachment.items():
        for doc_id in doc_ids:
            if doc_id not in index.doc_lengths:
                raise InvalidJoinSpec(f"doc {doc_id!r} attached to {node_id!r} is not indexed")
    result = SubgraphTermIndex(k=k, store_version=store_version)
    for i, nodes in enumerate(dense_subgraphs(graph, k)):
        vector: dict[str, float] = {}
        for node_id in sorted(nodes):
            for doc_id in doc_attachment.get(node_id, ()):
                for term, weight in index.term_vector(doc_id).items():
                    vector[term] = vector.get(term, 0.0) + weight
        norm = math.sqrt(sum(w * w for w in vector.values()))
        if norm > 0:
            vector = {t: w / norm for t, w in vector.items()}
        result.entries.append({
            "subgraph_id": f"sg{i}", "nodes": frozenset(nodes), "vector": vector,
        })
    return result


# --- time hierarchy -------------------------------------------------------------


@dataclass
class TimeNode:
    level: str  # year | month | day | hour
    key: tuple
    span: tuple[int, int]  # [start, end)
    refs: set = field(default_factory=set)
    children: dict = field(default_factory=dict)
    leaf_items: list = field(default_factory=list)  # (ref, ts) pairs on hour leaves


@dataclass
class TimeHierarchyIndex:
    roots: dict[int, TimeNode] = field(default_factory=dict)  # year -> node
    store_version: int = -1

    def validate(self) -> None:
        """Each parent's set must equal the union of its children's sets."""
        def check(node: TimeNode) -> None:
            if node.children:
                union = set()
                for child in node.children.values():
                    union |= child.refs
                    check(child)
                assert node.refs == union, f"parent-union violated at {node.level} {node.key}"
        for root in self.roots.values():
            check(root)

    def all_refs(self) -> set:
        out: set = set()
        for root in self.roots.values():
            out |= root.refs
        return out


_LEVELS = ("year", "month", "day", "hour")


def _utc(ts: int) -> datetime:
    return datetime.fromtimestamp(ts, tz=timezone.utc)


def _span_for(dt: datetime, level: str) -> tuple[int, int]:
    if level == "year":
        start = datetime(dt.year, 1, 1, tzinfo=timezone.utc)
        end = datetime(dt.year + 1, 1, 1, tzinfo=timezone.utc)
    elif level == "month":
        start = datetime(dt.year, dt.month, 1, tzinfo=timezone.utc)
        end = datetime(dt.year + (dt.month == 12), dt.month % 12 + 1, 1, tzinfo=timezone.utc)
    elif level == "day":
        start = datetime(dt.year, dt.month, dt.day, tzinfo=timezone.utc)
        end_ts = int(start.timestamp()) + 86400
        return int(start.timestamp()), end_ts
    else:
        start = datetime(dt.year, dt.month, dt.day, dt.hour, tzinfo=timezone.utc)
        end_ts = int(start.timestamp()) + 3600
        return int(start.timestamp()), end_ts
    return int(start.timestamp()), int(end.timestamp())


def build_time_hierarchy(records, store_version: int = -1) -> TimeHierarchyIndex:
    """records: iterable of (record ref, epoch seconds). Empty spans are
    never created."""
    index = TimeHierarchyIndex(store_version=store_version)
    for ref, ts in records:
        ts = int(ts)
        if ts < 0:
            raise InvalidInterval("timestamps must be >= 0")
        dt = _utc(ts)
        keys = {"year": (dt.year,), "month": (dt.year, dt.month),
                "day": (dt.year, dt.month, dt.day),
                "hour": (dt.year, dt.month, dt.day, dt.hour)}
        node = index.roots.get(dt.year)
        if node is None:
            node = TimeNode("year", keys["year"], _span_for(dt, "year"))
            index.roots[dt.year] = node
        node.refs.add(ref)
        for level in _LEVELS[1:]:
            child = node.children.get(keys[level])
            if child is None:
                child = TimeNode(level, keys[level], _span_for(dt, level))
                node.children[keys[level]] = child
            child.refs.add(ref)
            node = child
        node.leaf_items.append((ref, ts))
    return index


def time_range_lookup(index: TimeHierarchyIndex, start: int, end: int) -> set:
    """Records with start <= ts < end, assembled from maximal covered nodes;
    hour leaves straddling a boundary are scanned item by item."""
    if start >= end:
        raise InvalidInterval(f"invalid interval [{start}, {end})")
    out: set = set()

    def visit(node: TimeNode) -> None:
        s, e = node.span
        if e <= start or s >= end:
            return
        if start <= s and e <= end:
            out.update(node.refs)
            return
        if node.children:
            for child in node.children.values():
                visit(child)
        else:
            out.update(ref for ref, ts in node.leaf_items if start <= ts < end)

    for root in index.roots.values():
        visit(root)
    return out


def export_index(index) -> dict:
    """JSON-friendly dump, for debugging."""
    if isinstance(index, EdgeRecordIndex):
        return {
            "kind": "edge_record",
            "table": index.table_name,
            "edge_property": index.edge_property,
            "column": index.column,
            "entries": {e: sorted(map(list, refs)) for e, refs in index.edge_to_records.items()},
        }
    if isinstance(index, SubgraphTermIndex):
        return {
            "kind": "subgraph_terms", "k": index.k,
            "entries": [{"subgraph_id": e["subgraph_id"], "nodes": sorted(e["nodes"]),
                         "vector": dict(sorted(e["vector"].items()))} for e in index.entries],
        }
    if isinstance(index, TimeHierarchyIndex):
        def dump(node: TimeNode) -> dict:
            return {"level": node.level, "key": list(node.key), "span": list(node.span),
                    "count": len(node.refs),
                    "children": [dump(c) for _, c in sorted(node.children.items())]}
        return {"kind": "time_hierarchy",
                "roots": [dump(index.roots[y]) for y in sorted(index.roots)]}
    raise TypeError(f"not an index: {type(index)!r}")
