"""Visual objects: typed visualizations bound to in-memory datasets.

A visual object couples a chart type, the data model it renders, the column
bindings it was created with, a serializable render spec, and its current
interaction state.  The render spec carries the visible data inline so a
dashboard can draw it without further queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import IncompatibleModel, InvalidArguments, UnknownAction
from ..store.graph import PropertyGraph
from ..store.tables import Table
from ..store.timeseries import TimeSeries
from ..store.views import Matrix
from .scoring import ColumnProfile, DatasetDescription

SPEC_VERSION = 1

COMPATIBLE_DTYPES = {
    "table": {"relational"},
    "barChart": {"relational"},
    "pieChart": {"relational"},
    "heatmap": {"relational"},
    "multiTimePlot": {"timeseries"},
    "labeledGraph": {"graph"},
    "topicView": {"matrix", "document"},
}

INTERACTIONS = {
    "table": {"select_rows"},
    "barChart": {"select_bars", "suppress_bars"},
    "pieChart": {"select_slices"},
    "heatmap": {"select_cells", "select_rows", "select_cols"},
    "multiTimePlot": {"select_interval", "select_series"},
    "labeledGraph": {"select_neighborhood", "hide_nodes"},
    "topicView": {"select_topics"},
}

STATE_KEYS = {
    "table": {"rows"},
    "barChart": {"selected", "suppressed"},
    "pieChart": {"selected"},
    "heatmap": {"cells", "rows", "cols"},
    "multiTimePlot": {"interval", "series"},
    "labeledGraph": {"center", "radius", "neighborhood", "hidden"},
    "topicView": {"topics"},
}

# relation -> (required attributes, optional attributes)
ANNOTATION_RELATIONS = {
    "multiTimePlot": {"interval": (("start", "end"), ("label",)),
                      "series": (("name",), ())},
    "barChart": {"bars": (("category",), ()),
                 "label": (("category", "text"), ())},
    "heatmap": {"cells": (("x", "y"), ()),
                "rows": (("x",), ()),
                "cols": (("y",), ())},
    "labeledGraph": {"nodes": (("id",), ()),
                     "subgraph": (("ids",), ("label",))},
    "topicView": {"topics": (("topic_id",), ("label",))},
    "table": {"rows": (("ordinal",), ())},
}


@dataclass
class TopicBundle:
    """The three topic-model outputs plus the doc ids behind them."""
    params: dict
    topics: list[dict]  # {"topic", "terms": [[term, w]], "docs": [[doc_id, w]]}
    correlation: list[list[float]]
    divergence: list[list[float]]

    def top_terms(self, topic_id: int, limit: int = 10) -> list[str]:
        for entry in self.topics:
            if entry["topic"] == topic_id:
                return [t for t, _ in entry["terms"][:limit]]
        return []


@dataclass
class VisualObject:
    vis_id: int
    vtype: str
    dtype: str
    parameters: dict
    graphic: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)
    parent: int | None = None
    provenance: dict = field(default_factory=lambda: {"kind": "adhoc"})

    def as_dict(self) -> dict:
        return {
            "visID": self.vis_id, "vType": self.vtype, "dType": self.dtype,
            "parameters": self.parameters, "graphic": self.graphic,
            "state": self.state, "parent": self.parent, "provenance": self.provenance,
        }


def model_of(dataset) -> str:
    if isinstance(dataset, Table):
        return "relational"
    if isinstance(dataset, TimeSeries):
        return "timeseries"
    if isinstance(dataset, PropertyGraph):
        return "graph"
    if isinstance(dataset, Matrix):
        return "matrix"
    if isinstance(dataset, TopicBundle):
        return "document"
    raise IncompatibleModel(f"no data model for {type(dataset).__name__}")


def describe_dataset(dataset) -> DatasetDescription:
    model = model_of(dataset)
    if model != "relational":
        return DatasetDescription(model)
    columns = tuple(
        ColumnProfile(name, cls, dataset.distinct_count(name))
        for name, cls in dataset.columns
    )
    return DatasetDescription(model, columns)


def check_compatible(vtype: str, dtype: str) -> None:
    if vtype not in COMPATIBLE_DTYPES:
        raise IncompatibleModel(f"unknown visualization type {vtype!r}")
    if dtype not in COMPATIBLE_DTYPES[vtype]:
        raise IncompatibleModel(f"{vtype} cannot display {dtype} data")


def default_parameters(vtype: str, dataset, entity_kinds: dict | None = None) -> dict:
    """Column bindings inferred from the dataset, plus the render config ref."""
    params: dict = {"render_config": f"default-{vtype}", "entity_kinds": entity_kinds or {}}
    if isinstance(dataset, Table):
        cat = [n for n, c in dataset.columns if c in ("categorical", "identifier")]
        num = [n for n, c in dataset.columns if c in ("continuous", "ordinal")]
        if vtype in ("barChart", "pieChart"):
            if not cat or not num:
                raise IncompatibleModel(f"{vtype} needs a category and a value column")
            params["category"] = cat[0]
            params["value"] = num[0]
            params["k"] = 100
        elif vtype == "heatmap":
            if len(cat) < 2 or not num:
                raise IncompatibleModel("heatmap needs two category columns and a value")
            params["x"] = cat[0]
            params["y"] = cat[1]
            params["value"] = num[0]
    if vtype == "labeledGraph":
        params["max_nodes"] = 500
    return params


# --- render specs ------------------------------------------------------------


def build_graphic(vtype: str, dataset, parameters: dict, state: dict) -> dict:
    builder = _BUILDERS[vtype]
    spec = builder(dataset, parameters, state)
    spec["spec_version"] = SPEC_VERSION
    spec["vType"] = vtype
    return spec


def _table_spec(dataset: Table, parameters, state) -> dict:
    limit = parameters.get("limit", 500)
    return {
        "mark": "table",
        "columns": dataset.column_names(),
        "rows": [list(r) for r in dataset.rows[:limit]],
        "total_rows": len(dataset.rows),
        "selected_rows": state.get("rows", []),
    }


def _ranked_entries(dataset: Table, parameters, state):
    ci = dataset.col_index(parameters["category"])
    vi = dataset.col_index(parameters["value"])
    suppressed = set(state.get("suppressed", ()))
    entries = [(r[ci], r[vi]) for r in dataset.rows if r[ci] not in suppressed]
    entries.sort(key=lambda e: (-e[1], str(e[0])))
    return entries


def _bar_spec(dataset: Table, parameters, state) -> dict:
    entries = _ranked_entries(dataset, parameters, state)[: parameters.get("k", 100)]
    selected = set(state.get("selected", ()))
    return {
        "mark": "bar",
        "x": parameters["category"],
        "y": parameters["value"],
        "bars": [{"category": c, "value": v, "selected": c in selected}
                 for c, v in entries],
        "suppressed": sorted(state.get("suppressed", ())),
    }


def _pie_spec(dataset: Table, parameters, state) -> dict:
    entries = _ranked_entries(dataset, parameters, state)[:8]
    total = sum(v for _, v in entries) or 1.0
    selected = set(state.get("selected", ()))
    return {
        "mark": "arc",
        "slices": [{"category": c, "value": v, "fraction": v / total,
                    "selected": c in selected} for c, v in entries],
    }


def _heatmap_spec(dataset: Table, parameters, state) -> dict:
    xi = dataset.col_index(parameters["x"])
    yi = dataset.col_index(parameters["y"])
    vi = dataset.col_index(parameters["value"])
    cells = [{"x": r[xi], "y": r[yi], "value": r[vi]} for r in dataset.rows]
    return {
        "mark": "rect",
        "x": parameters["x"], "y": parameters["y"], "value": parameters["value"],
        "xs": sorted({str(c["x"]) for c in cells}),
        "ys": sorted({str(c["y"]) for c in cells}),
        "cells": cells,
        "selected_cells": state.get("cells", []),
    }


def _timeplot_spec(dataset, parameters, state) -> dict:
    if isinstance(dataset, TimeSeries):
        series = [dataset]
    else:
        series = list(dataset)
    shown = state.get("series")
    specs = []
    for s in series:
        if shown and s.name not in shown:
            continue
        specs.append({"name": s.name, "granularity": s.granularity,
                      "points": [[t, v] for t, v in s.points]})
    return {
        "mark": "line",
        "series": specs,
        "interval": state.get("interval"),
    }


def _graph_spec(dataset: PropertyGraph, parameters, state) -> dict:
    hidden = set(state.get("hidden", ()))
    highlight = set(state.get("neighborhood", ()))
    max_nodes = parameters.get("max_nodes", 500)
    node_ids = [n for n in sorted(dataset.nodes) if n not in hidden][:max_nodes]
    keep = set(node_ids)
    nodes = [{"id": n, "label": dataset.nodes[n].label,
              "highlighted": n in highlight} for n in node_ids]
    edges = []
    for eid in dataset.edges:
        e = dataset.edges[eid]
        if e.source in keep and e.target in keep:
            edges.append({"id": e.edge_id, "source": e.source, "target": e.target,
                          "label": e.label})
    return {"mark": "node-link", "directed": dataset.directed,
            "nodes": nodes, "edges": edges,
            "total_nodes": dataset.node_count(), "total_edges": dataset.edge_count()}


def _topic_spec(dataset: TopicBundle, parameters, state) -> dict:
    selected = set(state.get("topics", ()))
    return {
        "mark": "topic-panels",
        "topics": [{"topic": t["topic"], "terms": t["terms"], "docs": t["docs"],
                    "selected": t["topic"] in selected} for t in dataset.topics],
        "correlation": dataset.correlation,
        "divergence": dataset.divergence,
    }


_BUILDERS = {
    "table": _table_spec,
    "barChart": _bar_spec,
    "pieChart": _pie_spec,
    "heatmap": _heatmap_spec,
    "multiTimePlot": _timeplot_spec,
    "labeledGraph": _graph_spec,
    "topicView": _topic_spec,
}


# --- interactions -----------------------------------------------------------


def apply_interaction(visual: VisualObject, dataset, action: str, args: dict) -> dict:
    """Validate and apply an interaction, returning the updated state."""
    if action not in INTERACTIONS.get(visual.vtype, ()):
        raise UnknownAction(f"{visual.vtype} has no interaction {action!r}")
    handler = _ACTIONS[(visual.vtype, action)]
    handler(visual, dataset, args or {})
    illegal = set(visual.state) - STATE_KEYS[visual.vtype]
    if illegal:
        raise InvalidArguments(f"state keys {sorted(illegal)} not declared for {visual.vtype}")
    visual.graphic = build_graphic(visual.vtype, dataset, visual.parameters, visual.state)
    return visual.state


def _need(args: dict, key: str, kind=list):
    if key not in args or not isinstance(args[key], kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise InvalidArguments(f"interaction needs {key!r} of type {names}")
    return args[key]


def _act_select_rows(visual, dataset, args):
    visual.state["rows"] = [int(v) for v in _need(args, "ordinals")]


def _act_select_bars(visual, dataset, args):
    visual.state["selected"] = [str(c) for c in _need(args, "categories")]


def _act_suppress_bars(visual, dataset, args):
    extra = [str(c) for c in _need(args, "categories")]
    current = list(visual.state.get("suppressed", []))
    for c in extra:
        if c not in current:
            current.append(c)
    visual.state["suppressed"] = current


def _act_select_slices(visual, dataset, args):
    visual.state["selected"] = [str(c) for c in _need(args, "categories")]


def _act_select_cells(visual, dataset, args):
    cells = _need(args, "cells")
    for cell in cells:
        if not isinstance(cell, (list, tuple)) or len(cell) != 2:
            raise InvalidArguments("cells must be [x, y] pairs")
    visual.state["cells"] = [list(c) for c in cells]


def _act_select_hm_rows(visual, dataset, args):
    visual.state["rows"] = [str(v) for v in _need(args, "xs")]


def _act_select_hm_cols(visual, dataset, args):
    visual.state["cols"] = [str(v) for v in _need(args, "ys")]


def _act_select_interval(visual, dataset, args):
    start, end = _need(args, "start", (int, float)), _need(args, "end", (int, float))
    if start >= end:
        raise InvalidArguments("interval start must be < end")
    visual.state["interval"] = [int(start), int(end)]


def _act_select_series(visual, dataset, args):
    visual.state["series"] = [str(n) for n in _need(args, "names")]


def _act_select_neighborhood(visual, dataset, args):
    center = _need(args, "node_id", str)
    radius = args.get("radius", 1)
    if not isinstance(radius, int) or radius < 0:
        raise InvalidArguments("radius must be a non-negative integer")
    sub = dataset.neighborhood(center, radius)
    visual.state["center"] = center
    visual.state["radius"] = radius
    visual.state["neighborhood"] = sorted(sub.nodes)


def _act_hide_nodes(visual, dataset, args):
    ids = [str(v) for v in _need(args, "ids")]
    current = list(visual.state.get("hidden", []))
    for nid in ids:
        if nid not in current:
            current.append(nid)
    visual.state["hidden"] = current


def _act_select_topics(visual, dataset, args):
    visual.state["topics"] = [int(t) for t in _need(args, "topic_ids")]


_ACTIONS = {
    ("table", "select_rows"): _act_select_rows,
    ("barChart", "select_bars"): _act_select_bars,
    ("barChart", "suppress_bars"): _act_suppress_bars,
    ("pieChart", "select_slices"): _act_select_slices,
    ("heatmap", "select_cells"): _act_select_cells,
    ("heatmap", "select_rows"): _act_select_hm_rows,
    ("heatmap", "select_cols"): _act_select_hm_cols,
    ("multiTimePlot", "select_interval"): _act_select_interval,
    ("multiTimePlot", "select_series"): _act_select_series,
    ("labeledGraph", "select_neighborhood"): _act_select_neighborhood,
    ("labeledGraph", "hide_nodes"): _act_hide_nodes,
    ("topicView", "select_topics"): _act_select_topics,
}
