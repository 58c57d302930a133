"""Graph centralities and influencer detection.

PageRank treats parallel edges as link weight; betweenness is exact Brandes
accumulation on the collapsed simple graph.  Both are hand-rolled rather
than delegated so the multiplicity and normalization contracts stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import EmptyGraph, InvalidArguments
from ..store.graph import PropertyGraph


@dataclass
class CentralityScores:
    scores: dict[str, float]
    algorithm: str
    converged: bool = True
    iterations: int = 0

    def ranked(self) -> list[str]:
        return sorted(self.scores, key=lambda n: (-self.scores[n], n))


def pagerank(graph: PropertyGraph, damping: float = 0.85, tolerance: float = 1e-10,
             max_iterations: int = 200) -> CentralityScores:
    """Power iteration with uniform teleport; dangling mass is spread
    uniformly; stops when the L1 change drops below tolerance."""
    if graph.node_count() == 0:
        raise EmptyGraph("pagerank needs at least one node")
    if not 0.0 <= damping < 1.0:
        raise InvalidArguments(f"damping must be in [0, 1), got {damping}")
    nodes = sorted(graph.nodes)
    n = len(nodes)
    weight: dict[str, dict[str, float]] = {u: {} for u in nodes}
    for e in graph.edges.values():
        weight[e.source][e.target] = weight[e.source].get(e.target, 0.0) + 1.0
        if not graph.directed and e.source != e.target:
            weight[e.target][e.source] = weight[e.target].get(e.source, 0.0) + 1.0
    out_total = {u: sum(weight[u].values()) for u in nodes}

    x = {u: 1.0 / n for u in nodes}
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        dangling = sum(x[u] for u in nodes if out_total[u] == 0.0)
        nxt = {u: (1.0 - damping) / n + damping * dangling / n for u in nodes}
        for u in nodes:
            if out_total[u] == 0.0:
                continue
            share = damping * x[u] / out_total[u]
            for v, w in weight[u].items():
                nxt[v] += share * w
        delta = sum(abs(nxt[u] - x[u]) for u in nodes)
        x = nxt
        if delta < tolerance:
            converged = True
            break
    return CentralityScores(x, "pagerank", converged, iterations)


def betweenness(graph: PropertyGraph) -> CentralityScores:
    """Exact shortest-path betweenness (Brandes accumulation), unweighted,
    respecting directedness; normalized by (n-1)(n-2) pair slots."""
    if graph.node_count() == 0:
        raise EmptyGraph("betweenness needs at least one node")
    nodes = sorted(graph.nodes)
    n = len(nodes)
    if graph.directed:
        succ = {u: sorted(graph.successors(u) - {u}) for u in nodes}
    else:
        succ = {u: sorted(graph.neighbors(u) - {u}) for u in nodes}
    bc = {u: 0.0 for u in nodes}
    for s in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {u: [] for u in nodes}
        sigma = {u: 0.0 for u in nodes}
        sigma[s] = 1.0
        dist = {s: 0}
        queue = [s]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            for w in succ[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {u: 0.0 for u in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # Raw undirected accumulation counts each unordered pair twice, so the
    # directed and undirected normalizations collapse to the same divisor.
    norm = (n - 1) * (n - 2)
    scores = {u: (bc[u] / norm if norm > 0 else 0.0) for u in nodes}
    return CentralityScores(scores, "betweenness")


@dataclass
class InfluencerReport:
    influencers: list[str]
    percentile: float
    fallback: bool
    pagerank: CentralityScores
    betweenness: CentralityScores
    reachability: dict[str, PropertyGraph] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "influencers": list(self.influencers),
            "percentile": self.percentile,
            "fallback": self.fallback,
            "pagerank": dict(sorted(self.pagerank.scores.items())),
            "betweenness": dict(sorted(self.betweenness.scores.items())),
            "reachability": {
                node: {
                    "nodes": sorted(g.nodes),
                    "edges": [[e.source, e.target] for _, e in sorted(g.edges.items())],
                }
                for node, g in self.reachability.items()
            },
        }


def influencers(graph: PropertyGraph, percentile: float = 0.1,
                damping: float = 0.85, tolerance: float = 1e-10,
                max_iterations: int = 200) -> InfluencerReport:
    """Nodes in the top percentile by both PageRank and betweenness; when the
    intersection is empty, fall back to the single best combined-rank node."""
    if graph.node_count() == 0:
        raise EmptyGraph("influencer detection needs a non-empty graph")
    if not 0.0 < percentile <= 1.0:
        raise InvalidArguments(f"percentile must be in (0, 1], got {percentile}")
    pr = pagerank(graph, damping, tolerance, max_iterations)
    bt = betweenness(graph)
    m = math.ceil(percentile * graph.node_count())
    pr_order = pr.ranked()
    bt_order = bt.ranked()
    chosen = set(pr_order[:m]) & set(bt_order[:m])
    fallback = False
    if not chosen:
        fallback = True
        pr_rank = {node: i for i, node in enumerate(pr_order)}
        bt_rank = {node: i for i, node in enumerate(bt_order)}
        best = min(graph.nodes, key=lambda u: (pr_rank[u] + bt_rank[u], u))
        chosen = {best}
    report = InfluencerReport(sorted(chosen), percentile, fallback, pr, bt)
    for node in report.influencers:
        report.reachability[node] = graph.reachable_from(node)
    return report
