"""Model transformation: relational rows into a property graph.

Node ids are prefixed with the rule's label (``author:u17``) so id spaces
from different rules cannot collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidMapping
from .graph import PropertyGraph
from .tables import Table


@dataclass
class NodeRule:
    table: str
    id_column: str
    label: str
    property_columns: list[str] = field(default_factory=list)


@dataclass
class EdgeRule:
    table: str
    source_column: str
    target_column: str
    label: str
    property_columns: list[str] = field(default_factory=list)
    source_label: str = "entity"
    target_label: str = "entity"


@dataclass
class GraphMappingSpec:
    node_rules: list[NodeRule] = field(default_factory=list)
    edge_rules: list[EdgeRule] = field(default_factory=list)
    directed: bool = True

    @classmethod
    def from_dict(cls, data: dict) -> "GraphMappingSpec":
        try:
            nodes = [NodeRule(r["table"], r["id_column"], r["label"],
                              list(r.get("property_columns", [])))
                     for r in data.get("nodes", [])]
            edges = [EdgeRule(r["table"], r["source_column"], r["target_column"], r["label"],
                              list(r.get("property_columns", [])),
                              r.get("source_label", "entity"), r.get("target_label", "entity"))
                     for r in data.get("edges", [])]
        except KeyError as exc:
            raise InvalidMapping(f"mapping rule missing field {exc}") from None
        return cls(nodes, edges, bool(data.get("directed", True)))


def node_key(label: str, value) -> str:
    return f"{label}:{value}"


def _require_columns(table: Table, columns, rule: str) -> None:
    have = set(table.column_names())
    for col in columns:
        if col not in have:
            raise InvalidMapping(f"{rule}: column {col!r} not in table {table.name!r}")


def build_graph_from_relation(spec: GraphMappingSpec, tables: dict[str, Table]) -> PropertyGraph:
    """Nodes once per distinct id per rule; one edge per qualifying row.

    Multi-edges are preserved: social relations like repeated mentions keep
    their multiplicity.  Edge endpoints missing from node rules are created
    with the rule's endpoint labels.
    """
    graph = PropertyGraph(directed=spec.directed)
    for rule in spec.node_rules:
        if rule.table not in tables:
            raise InvalidMapping(f"node rule references missing table {rule.table!r}")
        table = tables[rule.table]
        _require_columns(table, [rule.id_column, *rule.property_columns], "node rule")
        if table.column_class(rule.id_column) != "identifier":
            raise InvalidMapping(f"node id column {rule.id_column!r} must be class identifier")
        idx = table.col_index(rule.id_column)
        prop_idx = [(c, table.col_index(c)) for c in rule.property_columns]
        for row in table.rows:
            nid = node_key(rule.label, row[idx])
            props = {c: row[i] for c, i in prop_idx}
            if nid in graph.nodes:
                graph.nodes[nid].props.update(props)
            else:
                graph.add_node(nid, rule.label, props)
    for rule in spec.edge_rules:
        if rule.table not in tables:
            raise InvalidMapping(f"edge rule references missing table {rule.table!r}")
        table = tables[rule.table]
        _require_columns(
            table, [rule.source_column, rule.target_column, *rule.property_columns], "edge rule")
        si = table.col_index(rule.source_column)
        ti = table.col_index(rule.target_column)
        prop_idx = [(c, table.col_index(c)) for c in rule.property_columns]
        for row in table.rows:
            src = node_key(rule.source_label, row[si])
            dst = node_key(rule.target_label, row[ti])
            graph.ensure_node(src, rule.source_label)
            graph.ensure_node(dst, rule.target_label)
            props = {c: row[i] for c, i in prop_idx}
            graph.add_edge(src, dst, rule.label, props)
    graph.validate()
    return graph
