"""Pre-defined query templates and their plan interpreter.

A template is a fixed, interpreted plan over the in-memory models -- no
optimizer.  Step vocabulary: scan, filter, group_count, join_via_index,
graph_pattern, time_range, topk, plus `analytic` for computation steps
(burst detection, query expansion, network construction) that relational
operators cannot express.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from ..analytics.bursts import BurstInterval, bursty_hashtags, detect_bursts
from ..analytics.expand import cooccurrence_expand
from ..canonical import binding_key
from ..errors import (InvalidArguments, MissingParameter, StaleIndex, TypeMismatch,
                      UnknownTemplate)
from ..store.base import Store
from ..store.graph import PropertyGraph
from ..store.graphmap import node_key
from ..store.tables import Table
from ..store.timeseries import TimeSeries
from ..store.views import Matrix
from ..xindex import build_edge_record_index, build_time_hierarchy, time_range_lookup
from .ops import merge_graph_relational, topk
from .pattern import eval_pattern, parse_pattern

SEMANTIC_TYPES = ("interval", "tagset", "authorset", "integer", "real", "string",
                  "tableref", "graphref")


@dataclass
class TemplateParameter:
    name: str
    semantic_type: str
    required: bool = False
    default: object = None


@dataclass
class QueryTemplate:
    template_id: str
    parameters: list[TemplateParameter]
    plan: list[dict]
    output_model: str
    entity_kinds: dict[str, str] = field(default_factory=dict)
    description: str = ""

    def parameter(self, name: str) -> TemplateParameter | None:
        for p in self.parameters:
            if p.name == name:
                return p
        return None


def load_catalog(path=None) -> dict[str, QueryTemplate]:
    """Template catalog from a JSON data file (the shipped one by default)."""
    if path is None:
        raw = resources.files("sleuth.data").joinpath("templates.json").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.read()
    data = json.loads(raw)
    catalog: dict[str, QueryTemplate] = {}
    for entry in data["templates"]:
        params = [TemplateParameter(p["name"], p["type"], bool(p.get("required", False)),
                                    p.get("default"))
                  for p in entry.get("parameters", [])]
        for p in params:
            if p.semantic_type not in SEMANTIC_TYPES:
                raise InvalidArguments(
                    f"template {entry['template_id']}: unknown type {p.semantic_type!r}")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise InvalidArguments(f"template {entry['template_id']}: duplicate parameters")
        catalog[entry["template_id"]] = QueryTemplate(
            entry["template_id"], params, entry["plan"], entry["output_model"],
            entry.get("entity_kinds", {}), entry.get("description", ""))
    return catalog


# --- binding validation ----------------------------------------------------------


def _normalize_interval(name, value):
    if (not isinstance(value, (list, tuple))) or len(value) != 2:
        raise TypeMismatch(name, "interval [start, end)", type(value).__name__)
    start, end = value
    if isinstance(start, bool) or isinstance(end, bool) or \
            not isinstance(start, (int, float)) or not isinstance(end, (int, float)):
        raise TypeMismatch(name, "interval of two timestamps")
    if start >= end:
        raise TypeMismatch(name, "interval with start < end")
    return (int(start), int(end))


def _normalize_stringset(name, value, lower: bool):
    if isinstance(value, str) or not hasattr(value, "__iter__"):
        raise TypeMismatch(name, "a set of strings", type(value).__name__)
    items = []
    for v in value:
        if not isinstance(v, str):
            raise TypeMismatch(name, "a set of strings", type(v).__name__)
        items.append(v.lower() if lower else v)
    return tuple(sorted(set(items)))


def normalize_binding(param: TemplateParameter, value):
    t = param.semantic_type
    name = param.name
    if t == "interval":
        return _normalize_interval(name, value)
    if t == "tagset":
        return _normalize_stringset(name, value, lower=True)
    if t == "authorset":
        return _normalize_stringset(name, value, lower=False)
    if t == "integer":
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(name, "integer", type(value).__name__)
        return value
    if t == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeMismatch(name, "real", type(value).__name__)
        return float(value)
    if t in ("string", "tableref", "graphref"):
        if not isinstance(value, str):
            raise TypeMismatch(name, t, type(value).__name__)
        return value
    raise TypeMismatch(name, "known semantic type", t)


def validate_bindings(template: QueryTemplate, bindings: dict) -> dict:
    declared = {p.name for p in template.parameters}
    for name in bindings:
        if name not in declared:
            raise TypeMismatch(name, "a declared template parameter", "unknown")
    normalized: dict[str, object] = {}
    for param in template.parameters:
        if param.name in bindings and bindings[param.name] is not None:
            normalized[param.name] = normalize_binding(param, bindings[param.name])
        elif param.default is not None:
            normalized[param.name] = normalize_binding(param, param.default)
        elif param.required:
            raise MissingParameter(param.name)
    return normalized


# --- computed-object cache -------------------------------------------------------


class ComputedCache:
    """Insert-if-absent dataset cache keyed by canonical binding hashes."""

    def __init__(self):
        self.entries: dict[str, object] = {}
        self.known_keys: set[str] = set()
        self.executions = 0
        self.hits = 0

    def get(self, key: str):
        if key in self.entries:
            self.hits += 1
            return self.entries[key]
        return None

    def put(self, key: str, dataset) -> None:
        self.entries.setdefault(key, dataset)
        self.known_keys.add(key)


# --- engine -----------------------------------------------------------------------


class QueryEngine:
    def __init__(self, store: Store, catalog: dict[str, QueryTemplate] | None = None):
        self.store = store
        self.templates = catalog if catalog is not None else load_catalog()
        self.indexes: dict[str, object] = {}

    # -- index lifecycle --

    def rebuild_indexes(self) -> None:
        self.indexes = {}
        tweets = self.store.tables["tweets"]
        ci = tweets.col_index("created_at")
        refs = [(("tweets", i), row[ci]) for i, row in enumerate(tweets.rows)]
        self.indexes["tweet_times"] = build_time_hierarchy(
            refs, store_version=self.store.version)
        if "mention_graph" in self.store.view_data:
            graph = self.store.view("mention_graph")
            self.indexes["mention_edge_records"] = build_edge_record_index(
                graph, tweets, "tweet_id", "tweet_id",
                store_version=self.store.version)

    def _index(self, name: str):
        idx = self.indexes.get(name)
        if idx is None:
            raise StaleIndex(f"index {name!r} has not been built")
        if idx.store_version != self.store.version:
            raise StaleIndex(f"index {name!r} was built at store version "
                             f"{idx.store_version}, store is at {self.store.version}")
        return idx

    # -- template execution --

    def run_template(self, template_id: str, bindings: dict,
                     cache: ComputedCache | None = None):
        template = self.templates.get(template_id)
        if template is None:
            raise UnknownTemplate(f"no template {template_id!r}")
        normalized = validate_bindings(template, bindings)
        key = binding_key(template_id, normalized, self.store.version)
        if cache is not None:
            hit = cache.get(key)
            if hit is not None:
                return hit
        result = self._execute(template, normalized)
        if cache is not None:
            cache.executions += 1
            cache.put(key, result)
        return result

    def template_key(self, template_id: str, bindings: dict) -> str:
        template = self.templates.get(template_id)
        if template is None:
            raise UnknownTemplate(f"no template {template_id!r}")
        return binding_key(template_id, validate_bindings(template, bindings),
                           self.store.version)

    def _execute(self, template: QueryTemplate, bindings: dict):
        env: dict[str, object] = {}
        out_name = None
        for step in template.plan:
            resolved = _resolve(step, bindings)
            op = resolved["op"]
            handler = getattr(self, f"_step_{op}", None)
            if handler is None:
                raise InvalidArguments(f"unknown plan step {op!r}")
            out_name = resolved.get("out")
            env[out_name] = handler(resolved, env)
        result = env[out_name]
        _check_output_model(template, result)
        return result

    # -- plan steps --

    def _step_scan(self, step, env):
        if "table" in step:
            name = step["table"]
            if name not in self.store.tables:
                raise InvalidArguments(f"unknown base table {name!r}")
            return self.store.tables[name]
        name = step["view"]
        return self.store.view(name)

    def _step_time_range(self, step, env):
        data = env[step["in"]]
        interval = step.get("interval")
        if interval is None:
            return data
        start, end = interval
        if isinstance(data, TimeSeries):
            return data.slice(start, end)
        if isinstance(data, PropertyGraph):
            prop = step.get("edge_property", "created_at")
            keep = PropertyGraph(directed=data.directed)
            for nid in sorted(data.nodes):
                n = data.nodes[nid]
                keep.add_node(n.node_id, n.label, n.props)
            for eid in data.edges:
                e = data.edges[eid]
                ts = e.props.get(prop)
                if ts is not None and start <= ts < end:
                    keep.add_edge(e.source, e.target, e.label, e.props, edge_id=e.edge_id)
            return keep
        column = step.get("column", "created_at")
        if data is self.store.tables.get("tweets") and "tweet_times" in self.indexes:
            index = self._index("tweet_times")
            ordinals = {ref[1] for ref in time_range_lookup(index, start, end)}
            rows = [row for i, row in enumerate(data.rows) if i in ordinals]
            return Table(data.name, list(data.columns), rows)
        ci = data.col_index(column)
        rows = [row for row in data.rows if start <= row[ci] < end]
        return Table(data.name, list(data.columns), rows)

    def _step_filter(self, step, env):
        data = env[step["in"]]
        if isinstance(data, PropertyGraph):
            return self._filter_graph(step, data)
        column = step["column"]
        cmp = step.get("cmp", "eq")
        value = step.get("value")
        if isinstance(value, dict) and "step" in value:
            source = env[value["step"]]
            if isinstance(source, Table):
                value = set(source.values(value["column"]))
            else:
                value = set(source)
        ci = data.col_index(column)
        if cmp == "eq":
            rows = [r for r in data.rows if r[ci] == value]
        elif cmp == "in":
            if value is None:
                return data
            members = set(value)
            rows = [r for r in data.rows if r[ci] in members]
        elif cmp == "not_in":
            if value is None:
                return data
            members = set(value)
            rows = [r for r in data.rows if r[ci] not in members]
        elif cmp == "ge":
            rows = [r for r in data.rows if r[ci] >= value]
        elif cmp == "le":
            rows = [r for r in data.rows if r[ci] <= value]
        else:
            raise InvalidArguments(f"unknown filter comparison {cmp!r}")
        return Table(data.name, list(data.columns), rows)

    def _filter_graph(self, step, graph: PropertyGraph) -> PropertyGraph:
        result = graph
        if step.get("nodes_in") is not None:
            label = step.get("node_label")
            wanted = set(step["nodes_in"])
            if label:
                keep = {node_key(label, v) for v in wanted}
            else:
                keep = wanted
            result = result.subgraph([n for n in result.nodes if n in keep])
        min_mult = step.get("min_edge_multiplicity")
        if min_mult is not None and min_mult > 1:
            mult = result.edge_multiplicities()
            trimmed = PropertyGraph(directed=result.directed)
            for nid in sorted(result.nodes):
                n = result.nodes[nid]
                trimmed.add_node(n.node_id, n.label, n.props)
            for eid in result.edges:
                e = result.edges[eid]
                key = (e.source, e.target)
                if not result.directed and e.source > e.target:
                    key = (e.target, e.source)
                if mult[key] >= min_mult:
                    trimmed.add_edge(e.source, e.target, e.label, e.props, edge_id=e.edge_id)
            result = trimmed
        return result

    def _step_group_count(self, step, env):
        data: Table = env[step["in"]]
        by = list(step["by"])
        renames = step.get("as", {})
        count_col = step.get("count_column", "count")
        distinct = step.get("distinct")
        idx = [data.col_index(c) for c in by]
        if distinct is not None:
            di = data.col_index(distinct)
            groups: dict[tuple, set] = {}
            for row in data.rows:
                groups.setdefault(tuple(row[i] for i in idx), set()).add(row[di])
            counts = {k: len(v) for k, v in groups.items()}
        else:
            counts = {}
            for row in data.rows:
                k = tuple(row[i] for i in idx)
                counts[k] = counts.get(k, 0) + 1
        columns = [(renames.get(c, c), data.column_class(c)) for c in by]
        columns.append((count_col, "continuous"))
        rows = [(*k, counts[k]) for k in sorted(counts, key=lambda k: tuple(map(str, k)))]
        return Table(step.get("out", "group_count"), columns, rows)

    def _step_topk(self, step, env):
        data: Table = env[step["in"]]
        return topk(data, step["column"], int(step["k"]),
                    bool(step.get("descending", True)))

    def _step_join_via_index(self, step, env):
        graph: PropertyGraph = env[step["in"]]
        index = self._index(step["index"])
        table = self.store.tables[index.table_name]
        return merge_graph_relational(graph, table, index,
                                      list(step.get("projection", [])),
                                      expected_version=self.store.version)

    def _step_graph_pattern(self, step, env):
        graph: PropertyGraph = env[step["in"]]
        return eval_pattern(parse_pattern(step["query"]), graph)

    def _step_analytic(self, step, env):
        fn = step["fn"]
        args = step.get("args", {})
        data = env[step["in"]] if "in" in step else None
        if fn == "detect_bursts":
            return detect_bursts(data, int(args.get("window", 25)),
                                 float(args.get("tau", 3.0)),
                                 int(args.get("min_len", 1)))
        if fn == "bursty_hashtags":
            intervals = [iv if isinstance(iv, BurstInterval) else BurstInterval(**iv)
                         for iv in data]
            return bursty_hashtags(intervals, int(args.get("k", 20)), self.store)
        if fn == "expand_tagset":
            seeds = tuple(args.get("seeds") or ())
            n = int(args.get("n") or 0)
            if n < 1:
                return seeds
            expansion = cooccurrence_expand(seeds, n, int(args.get("min_support") or 1),
                                            self.store)
            return tuple(sorted(set(seeds) | set(expansion.values("hashtag"))))
        if fn == "cooccurrence_graph":
            return _cooccurrence_graph(data, args.get("tags"),
                                       int(args.get("min_count") or 1))
        raise InvalidArguments(f"unknown analytic function {fn!r}")


def _cooccurrence_graph(use: Table, tags, min_count: int) -> PropertyGraph:
    """Hashtag co-occurrence network: one node per tag, one weighted edge per
    tag pair sharing at least min_count tweets."""
    ti = use.col_index("tweet_id")
    gi = use.col_index("tag")
    restrict = set(tags) if tags else None
    per_tweet: dict[str, set[str]] = {}
    for row in use.rows:
        if restrict is not None and row[gi] not in restrict:
            continue
        per_tweet.setdefault(row[ti], set()).add(row[gi])
    pair_counts: dict[tuple[str, str], int] = {}
    for tags_in_tweet in per_tweet.values():
        ordered = sorted(tags_in_tweet)
        for i in range(len(ordered)):
            for j in range(i + 1, len(ordered)):
                pair = (ordered[i], ordered[j])
                pair_counts[pair] = pair_counts.get(pair, 0) + 1
    graph = PropertyGraph(directed=False)
    if restrict is not None:
        for tag in sorted(restrict):
            graph.ensure_node(node_key("hashtag", tag), "hashtag", {"tag": tag})
    for (a, b), n in sorted(pair_counts.items()):
        if n < min_count:
            continue
        na, nb = node_key("hashtag", a), node_key("hashtag", b)
        graph.ensure_node(na, "hashtag", {"tag": a})
        graph.ensure_node(nb, "hashtag", {"tag": b})
        graph.add_edge(na, nb, "cooccurs", {"count": n})
    return graph


def _resolve(step, bindings: dict):
    """Substitute "$param" placeholders with bound values, recursively."""
    if isinstance(step, str) and step.startswith("$"):
        return bindings.get(step[1:])
    if isinstance(step, dict):
        return {k: _resolve(v, bindings) for k, v in step.items()}
    if isinstance(step, list):
        return [_resolve(v, bindings) for v in step]
    return step


_MODEL_TYPES = {
    "relational": Table,
    "graph": PropertyGraph,
    "timeseries": TimeSeries,
    "matrix": Matrix,
}


def _check_output_model(template: QueryTemplate, result) -> None:
    expected = _MODEL_TYPES.get(template.output_model)
    if expected is not None and not isinstance(result, expected):
        raise InvalidArguments(
            f"template {template.template_id} produced {type(result).__name__}, "
            f"declared output model is {template.output_model}")
