"""Exploration sessions: navigation tree, annotations, parameter passing.

A session is a rooted tree of visual objects.  Deriving a new visualization
gathers parameter candidates from the current object's annotations and
interaction state; annotation candidates resolve automatically when unique,
state-sourced candidates are always surfaced as ambiguities for the user to
confirm, and computed datasets are cached by canonical binding key so
backtracking never repeats work.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..canonical import canonicalize
from ..errors import (CorruptArchive, SchemaMismatch, UnknownRelation, UnknownTemplate,
                      UnknownVisID, UnresolvedAmbiguity)
from ..queryengine.templates import ComputedCache, QueryEngine
from ..store.tables import Table
from .scoring import score_representations
from .visuals import (ANNOTATION_RELATIONS, COMPATIBLE_DTYPES, TopicBundle, VisualObject,
                      apply_interaction, build_graphic, check_compatible,
                      default_parameters, describe_dataset, model_of)

ARCHIVE_VERSION = 1


@dataclass
class Annotation:
    annotation_id: int
    vis_id: int
    relation: str
    tuples: list[dict]
    label: str | None = None

    def as_dict(self) -> dict:
        return {"annotation_id": self.annotation_id, "visID": self.vis_id,
                "relation": self.relation, "tuples": self.tuples, "label": self.label}


@dataclass
class BindingProposal:
    template_id: str
    resolved: dict[str, dict]  # name -> {"value", "provenance"}
    ambiguities: list[dict]    # {"parameter", "semantic_type", "candidates": [...]}

    def as_dict(self) -> dict:
        return {"template_id": self.template_id, "resolved": self.resolved,
                "ambiguities": self.ambiguities}


def corpus_summary_table(store) -> Table:
    stats = store.stats()
    rows = [
        ("tweets", float(stats["tweets"])),
        ("authors", float(stats["authors"])),
        ("hashtags", float(stats["hashtags"])),
        ("mentions", float(stats["mentions"])),
    ]
    return Table("corpus_summary",
                 [("metric", "categorical"), ("value", "continuous")], rows)


class Session:
    def __init__(self, session_id: str, engine: QueryEngine,
                 analytic_resolvers: dict | None = None, with_root: bool = True):
        self.session_id = session_id
        self.engine = engine
        self.cache = ComputedCache()
        self.visuals: dict[int, VisualObject] = {}
        self.datasets: dict[int, object] = {}
        self.annotations: dict[int, list[Annotation]] = {}
        self.analytic_resolvers = analytic_resolvers or {}
        self.focus: int | None = None
        self._next_vis = 0
        self._next_annotation = 0
        if with_root:
            summary = corpus_summary_table(engine.store)
            self.create_visual("table", "relational", summary,
                               provenance={"kind": "corpus_summary"})

    # --- object lifecycle ---------------------------------------------------

    def create_visual(self, vtype: str, dtype: str, dataset, parameters: dict | None = None,
                      provenance: dict | None = None, parent: int | None = None,
                      entity_kinds: dict | None = None) -> VisualObject:
        check_compatible(vtype, dtype)
        if dataset is not None and model_of(dataset) != dtype:
            raise SchemaMismatch(
                f"dataset model {model_of(dataset)} does not match dType {dtype}")
        if parameters is None:
            parameters = default_parameters(vtype, dataset, entity_kinds)
        vis_id = self._next_vis
        self._next_vis += 1
        if parent is None:
            parent = self.focus
        visual = VisualObject(
            vis_id=vis_id, vtype=vtype, dtype=dtype, parameters=parameters,
            state={}, parent=parent,
            provenance=provenance or {"kind": "adhoc"},
        )
        visual.graphic = build_graphic(vtype, dataset, parameters, visual.state)
        self.visuals[vis_id] = visual
        self.datasets[vis_id] = dataset
        self.annotations[vis_id] = []
        self.focus = vis_id
        return visual

    def visual(self, vis_id: int) -> VisualObject:
        if vis_id not in self.visuals:
            raise UnknownVisID(f"no visual {vis_id} in session {self.session_id}")
        return self.visuals[vis_id]

    def dataset_of(self, vis_id: int):
        """The visual's dataset, recomputed from provenance when absent."""
        visual = self.visual(vis_id)
        if self.datasets.get(vis_id) is not None:
            return self.datasets[vis_id]
        prov = visual.provenance
        if prov.get("kind") == "template":
            dataset = self.engine.run_template(prov["template_id"], prov["bindings"],
                                               self.cache)
        elif prov.get("kind") == "corpus_summary":
            dataset = corpus_summary_table(self.engine.store)
        elif prov.get("kind") == "analytic" and prov.get("op") in self.analytic_resolvers:
            dataset = self.analytic_resolvers[prov["op"]](prov.get("args", {}))
        else:
            raise UnknownVisID(f"visual {vis_id} has no recomputable dataset")
        self.datasets[vis_id] = dataset
        return dataset

    # --- interaction ---------------------------------------------------------

    def interact(self, vis_id: int, action: str, args: dict) -> dict:
        visual = self.visual(vis_id)
        dataset = self.dataset_of(vis_id)
        return apply_interaction(visual, dataset, action, args)

    # --- annotations -----------------------------------------------------------

    def annotate(self, vis_id: int, relation: str, tuples: list[dict],
                 label: str | None = None) -> Annotation:
        visual = self.visual(vis_id)
        vocabulary = ANNOTATION_RELATIONS.get(visual.vtype, {})
        if relation not in vocabulary:
            raise UnknownRelation(
                f"{visual.vtype} has no annotation relation {relation!r}")
        required, optional = vocabulary[relation]
        if not isinstance(tuples, list) or not tuples:
            raise SchemaMismatch("annotation needs at least one tuple")
        allowed = set(required) | set(optional)
        for tup in tuples:
            if not isinstance(tup, dict):
                raise SchemaMismatch("annotation tuples must be attribute maps")
            missing = set(required) - set(tup)
            if missing:
                raise SchemaMismatch(f"tuple missing attributes {sorted(missing)}")
            unknown = set(tup) - allowed
            if unknown:
                raise SchemaMismatch(f"tuple has undeclared attributes {sorted(unknown)}")
        annotation = Annotation(self._next_annotation, vis_id, relation,
                                [dict(t) for t in tuples], label)
        self._next_annotation += 1
        self.annotations[vis_id].append(annotation)
        return annotation

    # --- parameter candidates ---------------------------------------------------

    def _entity_kind(self, visual: VisualObject, column: str) -> str | None:
        return (visual.parameters.get("entity_kinds") or {}).get(column)

    def _annotation_candidates(self, visual: VisualObject) -> dict[str, list[dict]]:
        """Typed candidate values extracted from annotations, per semantic type."""
        out: dict[str, list[dict]] = {}

        def add(semtype: str | None, value, origin: str):
            if semtype is None:
                return
            out.setdefault(semtype, []).append(
                {"value": value, "provenance": "annotation", "origin": origin})

        for ann in self.annotations.get(visual.vis_id, ()):
            origin = f"annotation:{ann.relation}#{ann.annotation_id}"
            if ann.relation == "interval":
                for tup in ann.tuples:
                    add("interval", [tup["start"], tup["end"]], origin)
            elif ann.relation == "bars":
                kind = self._entity_kind(visual, visual.parameters.get("category", ""))
                add(kind, sorted({str(t["category"]) for t in ann.tuples}), origin)
            elif ann.relation == "cells":
                xkind = self._entity_kind(visual, visual.parameters.get("x", ""))
                ykind = self._entity_kind(visual, visual.parameters.get("y", ""))
                add(xkind, sorted({str(t["x"]) for t in ann.tuples}), origin)
                add(ykind, sorted({str(t["y"]) for t in ann.tuples}), origin)
            elif ann.relation == "rows" and visual.vtype == "heatmap":
                xkind = self._entity_kind(visual, visual.parameters.get("x", ""))
                add(xkind, sorted({str(t["x"]) for t in ann.tuples}), origin)
            elif ann.relation == "cols":
                ykind = self._entity_kind(visual, visual.parameters.get("y", ""))
                add(ykind, sorted({str(t["y"]) for t in ann.tuples}), origin)
            elif ann.relation in ("nodes", "subgraph"):
                ids: list[str] = []
                for tup in ann.tuples:
                    ids.extend([tup["id"]] if "id" in tup else list(tup.get("ids", ())))
                by_label: dict[str, list[str]] = {}
                for nid in ids:
                    label, _, raw = str(nid).partition(":")
                    by_label.setdefault(label, []).append(raw or label)
                for label, values in sorted(by_label.items()):
                    add(self._entity_kind(visual, label), sorted(set(values)), origin)
            elif ann.relation == "topics":
                bundle = self.datasets.get(visual.vis_id)
                if isinstance(bundle, TopicBundle):
                    terms: set[str] = set()
                    for tup in ann.tuples:
                        terms |= set(bundle.top_terms(int(tup["topic_id"])))
                    add("tagset", sorted(terms), origin)
            elif ann.relation == "series":
                add("string", str(ann.tuples[0]["name"]), origin)
        return out

    def _state_candidates(self, visual: VisualObject) -> dict[str, list[dict]]:
        out: dict[str, list[dict]] = {}

        def add(semtype: str | None, value, origin: str):
            if semtype is None or value in (None, [], ()):
                return
            out.setdefault(semtype, []).append(
                {"value": value, "provenance": "state", "origin": origin})

        state = visual.state
        if visual.vtype == "multiTimePlot" and state.get("interval"):
            add("interval", list(state["interval"]), "state:interval")
        if visual.vtype in ("barChart", "pieChart") and state.get("selected"):
            kind = self._entity_kind(visual, visual.parameters.get("category", ""))
            add(kind, sorted(state["selected"]), "state:selected")
        if visual.vtype == "heatmap":
            if state.get("rows"):
                add(self._entity_kind(visual, visual.parameters.get("x", "")),
                    sorted(state["rows"]), "state:rows")
            if state.get("cols"):
                add(self._entity_kind(visual, visual.parameters.get("y", "")),
                    sorted(state["cols"]), "state:cols")
            if state.get("cells"):
                add(self._entity_kind(visual, visual.parameters.get("x", "")),
                    sorted({str(c[0]) for c in state["cells"]}), "state:cells")
                add(self._entity_kind(visual, visual.parameters.get("y", "")),
                    sorted({str(c[1]) for c in state["cells"]}), "state:cells")
        if visual.vtype == "labeledGraph" and state.get("neighborhood"):
            by_label: dict[str, list[str]] = {}
            for nid in state["neighborhood"]:
                label, _, raw = str(nid).partition(":")
                by_label.setdefault(label, []).append(raw or label)
            for label, values in sorted(by_label.items()):
                add(self._entity_kind(visual, label), sorted(set(values)),
                    "state:neighborhood")
        if visual.vtype == "topicView" and state.get("topics"):
            bundle = self.datasets.get(visual.vis_id)
            if isinstance(bundle, TopicBundle):
                terms: set[str] = set()
                for t in state["topics"]:
                    terms |= set(bundle.top_terms(int(t)))
                add("tagset", sorted(terms), "state:topics")
        return out

    def propose_bindings(self, from_vis: int, template_id: str) -> BindingProposal:
        """Resolution rule: a unique annotation candidate auto-resolves; state
        candidates always surface as ambiguities; defaults fill the rest;
        required parameters with no source become empty-candidate ambiguities."""
        template = self.engine.templates.get(template_id)
        if template is None:
            raise UnknownTemplate(f"no template {template_id!r}")
        visual = self.visual(from_vis)
        ann_cands = self._annotation_candidates(visual)
        state_cands = self._state_candidates(visual)
        resolved: dict[str, dict] = {}
        ambiguities: list[dict] = []
        for param in template.parameters:
            anns = ann_cands.get(param.semantic_type, [])
            states = state_cands.get(param.semantic_type, [])
            if len(anns) == 1:
                resolved[param.name] = {"value": anns[0]["value"],
                                        "provenance": "annotation",
                                        "origin": anns[0]["origin"]}
            elif len(anns) >= 2:
                ambiguities.append({"parameter": param.name,
                                    "semantic_type": param.semantic_type,
                                    "candidates": anns})
            elif states:
                candidates = list(states)
                if param.default is not None:
                    candidates.append({"value": param.default, "provenance": "default",
                                       "origin": "template-default"})
                ambiguities.append({"parameter": param.name,
                                    "semantic_type": param.semantic_type,
                                    "candidates": candidates})
            elif param.default is not None:
                resolved[param.name] = {"value": param.default, "provenance": "default",
                                        "origin": "template-default"}
            elif param.required:
                ambiguities.append({"parameter": param.name,
                                    "semantic_type": param.semantic_type,
                                    "candidates": []})
        return BindingProposal(template_id, resolved, ambiguities)

    # --- derivation -----------------------------------------------------------

    def derive_visual(self, from_vis: int, template_id: str,
                      resolution: dict | None = None,
                      vtype_override: str | None = None) -> VisualObject:
        proposal = self.propose_bindings(from_vis, template_id)
        resolution = resolution or {}
        for ambiguity in proposal.ambiguities:
            if ambiguity["parameter"] not in resolution:
                raise UnresolvedAmbiguity(ambiguity["parameter"])
        bindings = {name: entry["value"] for name, entry in proposal.resolved.items()}
        bindings.update(resolution)
        bindings = {k: v for k, v in bindings.items() if v is not None}
        dataset = self.engine.run_template(template_id, bindings, self.cache)
        dtype = model_of(dataset)
        if vtype_override is not None:
            vtype = vtype_override
        else:
            ranked = score_representations(describe_dataset(dataset))
            vtype = next(v for v, _ in ranked if dtype in COMPATIBLE_DTYPES[v])
        template = self.engine.templates[template_id]
        return self.create_visual(
            vtype, dtype, dataset,
            parameters=default_parameters(vtype, dataset, template.entity_kinds),
            provenance={"kind": "template", "template_id": template_id,
                        "bindings": canonicalize(bindings)},
            parent=from_vis,
        )

    # --- navigation ------------------------------------------------------------

    def backtrack(self, to_vis: int) -> VisualObject:
        visual = self.visual(to_vis)
        self.focus = to_vis
        return visual

    def tree(self) -> dict:
        edges = [[v.parent, v.vis_id] for v in self.visuals.values()
                 if v.parent is not None]
        return {
            "session_id": self.session_id,
            "focus": self.focus,
            "nodes": [self.visuals[v].as_dict() for v in sorted(self.visuals)],
            "edges": sorted(edges),
            "annotations": [a.as_dict() for anns in self.annotations.values()
                            for a in anns],
        }

    def assert_tree_invariants(self) -> None:
        roots = [v for v in self.visuals.values() if v.parent is None]
        assert len(roots) <= 1 or all(r.parent is None for r in roots)
        for v in self.visuals.values():
            seen = set()
            cur = v
            while cur.parent is not None:
                assert cur.vis_id not in seen, "cycle in session tree"
                seen.add(cur.vis_id)
                assert cur.parent in self.visuals, "dangling parent"
                cur = self.visuals[cur.parent]

    # --- persistence ----------------------------------------------------------

    def export_archive(self) -> dict:
        return {
            "version": ARCHIVE_VERSION,
            "session_id": self.session_id,
            "focus": self.focus,
            "next_vis": self._next_vis,
            "next_annotation": self._next_annotation,
            "nodes": [self.visuals[v].as_dict() for v in sorted(self.visuals)],
            "edges": sorted([[v.parent, v.vis_id] for v in self.visuals.values()
                             if v.parent is not None]),
            "annotations": [a.as_dict() for vis in sorted(self.annotations)
                            for a in self.annotations[vis]],
            "cache_keys": sorted(self.cache.known_keys),
        }

    @classmethod
    def import_archive(cls, archive, engine: QueryEngine, session_id: str | None = None,
                       analytic_resolvers: dict | None = None) -> "Session":
        if isinstance(archive, (str, bytes)):
            try:
                archive = json.loads(archive)
            except json.JSONDecodeError as exc:
                raise CorruptArchive(f"archive is not valid JSON: {exc}") from None
        if not isinstance(archive, dict):
            raise CorruptArchive("archive must be a JSON object")
        missing = {"version", "session_id", "focus", "nodes", "annotations",
                   "cache_keys"} - set(archive)
        if missing:
            raise CorruptArchive(f"archive missing fields: {sorted(missing)}")
        if archive["version"] != ARCHIVE_VERSION:
            raise CorruptArchive(f"unsupported archive version {archive['version']!r}")
        session = cls(session_id or archive["session_id"], engine,
                      analytic_resolvers=analytic_resolvers, with_root=False)
        try:
            for node in archive["nodes"]:
                visual = VisualObject(
                    vis_id=int(node["visID"]), vtype=node["vType"], dtype=node["dType"],
                    parameters=node["parameters"], graphic=node["graphic"],
                    state=node["state"], parent=node["parent"],
                    provenance=node.get("provenance", {"kind": "adhoc"}),
                )
                session.visuals[visual.vis_id] = visual
                session.annotations[visual.vis_id] = []
            for ann in archive["annotations"]:
                session.annotations[int(ann["visID"])].append(Annotation(
                    int(ann["annotation_id"]), int(ann["visID"]), ann["relation"],
                    ann["tuples"], ann.get("label")))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptArchive(f"malformed archive entry: {exc}") from None
        for visual in session.visuals.values():
            if visual.parent is not None and visual.parent not in session.visuals:
                raise CorruptArchive(f"node {visual.vis_id} has a dangling parent")
        focus = archive["focus"]
        if focus is not None and focus not in session.visuals:
            raise CorruptArchive("archive focus is not a node")
        session.focus = focus
        session._next_vis = int(archive.get("next_vis",
                                            max(session.visuals, default=-1) + 1))
        session._next_annotation = int(archive.get("next_annotation", 0))
        session.cache.known_keys = set(archive["cache_keys"])
        session.assert_tree_invariants()
        return session
