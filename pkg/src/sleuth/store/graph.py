"""Property multigraph: labeled nodes and edges carrying attribute maps."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import GraphInvariantViolation, NodeNotFound


@dataclass
class Node:
    node_id: str
    label: str
    props: dict = field(default_factory=dict)


@dataclass
class Edge:
    edge_id: str
    source: str
    target: str
    label: str
    props: dict = field(default_factory=dict)


class PropertyGraph:
    """Directed or undirected multigraph; endpoint existence and id
    uniqueness are enforced on every mutation."""

    def __init__(self, directed: bool = True):
        self.directed = directed
        self.nodes: dict[str, Node] = {}
        self.edges: dict[str, Edge] = {}
        self._out: dict[str, list[str]] = {}
        self._in: dict[str, list[str]] = {}

    def add_node(self, node_id: str, label: str = "node", props: dict | None = None) -> Node:
        if node_id in self.nodes:
            raise GraphInvariantViolation(f"duplicate node id {node_id!r}")
        node = Node(node_id, label, dict(props or {}))
        self.nodes[node_id] = node
        self._out[node_id] = []
        self._in[node_id] = []
        return node

    def ensure_node(self, node_id: str, label: str = "node", props: dict | None = None) -> Node:
        if node_id in self.nodes:
            return self.nodes[node_id]
        return self.add_node(node_id, label, props)

    def add_edge(self, source: str, target: str, label: str = "edge",
                 props: dict | None = None, edge_id: str | None = None) -> Edge:
        if source not in self.nodes:
            raise GraphInvariantViolation(f"edge source {source!r} does not exist")
        if target not in self.nodes:
            raise GraphInvariantViolation(f"edge target {target!r} does not exist")
        if edge_id is None:
            edge_id = f"e{len(self.edges)}"
        if edge_id in self.edges:
            raise GraphInvariantViolation(f"duplicate edge id {edge_id!r}")
        edge = Edge(edge_id, source, target, label, dict(props or {}))
        self.edges[edge_id] = edge
        self._out[source].append(edge_id)
        self._in[target].append(edge_id)
        return edge

    def out_edges(self, node_id: str) -> list[Edge]:
        return [self.edges[e] for e in self._out.get(node_id, ())]

    def in_edges(self, node_id: str) -> list[Edge]:
        return [self.edges[e] for e in self._in.get(node_id, ())]

    def neighbors(self, node_id: str) -> set[str]:
        """Adjacent node ids ignoring direction and edge multiplicity."""
        out = {self.edges[e].target for e in self._out.get(node_id, ())}
        inc = {self.edges[e].source for e in self._in.get(node_id, ())}
        return out | inc

    def successors(self, node_id: str) -> set[str]:
        return {self.edges[e].target for e in self._out.get(node_id, ())}

    def adjacency(self) -> dict[str, set[str]]:
        """Simple-graph adjacency (direction ignored, multi-edges collapsed)."""
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for e in self.edges.values():
            if e.source != e.target:
                adj[e.source].add(e.target)
                adj[e.target].add(e.source)
        return adj

    def neighborhood(self, node_id: str, radius: int) -> "PropertyGraph":
        """Induced subgraph of all nodes within `radius` hops, direction ignored."""
        if node_id not in self.nodes:
            raise NodeNotFound(f"node {node_id!r} not in graph")
        if radius < 0:
            raise GraphInvariantViolation("radius must be >= 0")
        keep = {node_id}
        frontier = {node_id}
        adj = self.adjacency()
        for _ in range(radius):
            frontier = {m for n in frontier for m in adj[n]} - keep
            if not frontier:
                break
            keep |= frontier
        return self.subgraph(keep)

    def subgraph(self, node_ids) -> "PropertyGraph":
        keep = set(node_ids)
        sub = PropertyGraph(directed=self.directed)
        for nid in sorted(keep):
            if nid not in self.nodes:
                raise NodeNotFound(f"node {nid!r} not in graph")
            n = self.nodes[nid]
            sub.add_node(n.node_id, n.label, n.props)
        for eid in self.edges:
            e = self.edges[eid]
            if e.source in keep and e.target in keep:
                sub.add_edge(e.source, e.target, e.label, e.props, edge_id=e.edge_id)
        return sub

    def reachable_from(self, node_id: str) -> "PropertyGraph":
        """Forward-reachability subgraph by directed paths (the node included)."""
        if node_id not in self.nodes:
            raise NodeNotFound(f"node {node_id!r} not in graph")
        seen = {node_id}
        stack = [node_id]
        while stack:
            n = stack.pop()
            for m in self.successors(n):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return self.subgraph(seen)

    def edge_multiplicities(self) -> dict[tuple[str, str], int]:
        """Edge counts per (source, target); undirected pairs are canonicalized."""
        counts: dict[tuple[str, str], int] = {}
        for e in self.edges.values():
            key = (e.source, e.target)
            if not self.directed and e.source > e.target:
                key = (e.target, e.source)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def validate(self) -> None:
        for e in self.edges.values():
            if e.source not in self.nodes or e.target not in self.nodes:
                raise GraphInvariantViolation(f"edge {e.edge_id} references a missing node")

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"<PropertyGraph {kind} nodes={len(self.nodes)} edges={len(self.edges)}>"
