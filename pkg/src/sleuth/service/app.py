"""HTTP facade over the engine.

Every engine error surfaces as a JSON ApiError with its stable code; the
derive endpoint encodes ambiguity resolution as a two-step protocol, replying
409 with the binding proposal until the client re-posts resolutions.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..canonical import canonicalize
from ..errors import SleuthError, UnresolvedAmbiguity
from ..explore import Session, TopicBundle, describe_dataset, model_of
from ..explore.scoring import score_representations
from ..explore.visuals import COMPATIBLE_DTYPES, default_parameters
from ..store import Matrix, PropertyGraph, Table, TimeSeries
from .state import EngineState

DEFAULT_PAGE_SIZE = 500

_STATUS_BY_CODE = {
    "UNKNOWN_TEMPLATE": 404, "UNKNOWN_VIS_ID": 404, "UNKNOWN_SESSION": 404,
    "NODE_NOT_FOUND": 404, "FILE_NOT_FOUND": 404,
    "UNRESOLVED_AMBIGUITY": 409, "DUPLICATE_VIEW_ID": 409,
    "STALE_INDEX": 503,
}


def _status_for(exc: SleuthError) -> int:
    return _STATUS_BY_CODE.get(exc.code, 400)


def dataset_payload(dataset, cursor: int = 0, limit: int = DEFAULT_PAGE_SIZE) -> dict:
    """Wire form of a dataset; relational tables are cursor-paginated."""
    if isinstance(dataset, Table):
        rows = dataset.rows[cursor:cursor + limit]
        next_cursor = cursor + limit if cursor + limit < len(dataset.rows) else None
        return {
            "model": "relational",
            "columns": [{"name": n, "class": c} for n, c in dataset.columns],
            "rows": [list(r) for r in rows],
            "total_rows": len(dataset.rows),
            "cursor": str(next_cursor) if next_cursor is not None else None,
        }
    if isinstance(dataset, TimeSeries):
        return {"model": "timeseries", "name": dataset.name,
                "granularity": dataset.granularity,
                "points": [[t, v] for t, v in dataset.points]}
    if isinstance(dataset, PropertyGraph):
        return {
            "model": "graph", "directed": dataset.directed,
            "nodes": [{"id": n.node_id, "label": n.label, "props": n.props}
                      for _, n in sorted(dataset.nodes.items())],
            "edges": [{"id": e.edge_id, "source": e.source, "target": e.target,
                       "label": e.label, "props": e.props}
                      for _, e in sorted(dataset.edges.items())],
        }
    if isinstance(dataset, Matrix):
        return {"model": "matrix", "rows": dataset.row_labels,
                "cols": dataset.col_labels, "values": dataset.values}
    if isinstance(dataset, TopicBundle):
        return {"model": "document", "topics": dataset.topics,
                "correlation": dataset.correlation, "divergence": dataset.divergence,
                "params": dataset.params}
    raise SleuthError(f"unsupported dataset type {type(dataset).__name__}")


def create_app(state: EngineState | None = None) -> FastAPI:
    state = state or EngineState()
    app = FastAPI(title="sleuth", version="0.1.0")
    app.state.engine_state = state

    @app.exception_handler(SleuthError)
    async def engine_error_handler(_request: Request, exc: SleuthError):
        return JSONResponse(status_code=_status_for(exc), content=exc.as_dict())

    @app.get("/health")
    def health():
        stats = state.store.stats()
        return {"status": "ready" if state.ready else "loading",
                "views": len(state.store.view_defs), "tweets": stats["tweets"]}

    @app.post("/ingest")
    async def ingest(request: Request):
        body = await request.json()
        if body.get("synthetic"):
            result = state.ingest_synthetic(body["synthetic"], int(body.get("seed", 0)))
            return result
        stats = state.ingest_file(body["path"], body.get("keywords"))
        return stats.as_dict()

    @app.post("/views/refresh")
    def refresh():
        report = state.refresh()
        return {"views": report.entries, "duration_ms": report.duration_ms}

    @app.post("/sessions")
    def create_session():
        session = state.new_session()
        root = session.visuals[0].as_dict() if session.visuals else None
        return {"session_id": session.session_id, "root": root}

    @app.get("/sessions/{sid}/tree")
    def tree(sid: str):
        return state.session(sid).tree()

    @app.get("/sessions/{sid}/visuals/{vid}")
    def get_visual(sid: str, vid: int):
        return state.session(sid).visual(vid).as_dict()

    @app.get("/sessions/{sid}/visuals/{vid}/data")
    def get_visual_data(sid: str, vid: int, cursor: str | None = None,
                        limit: int = DEFAULT_PAGE_SIZE):
        session = state.session(sid)
        dataset = session.dataset_of(vid)
        offset = int(cursor) if cursor else 0
        return dataset_payload(dataset, offset, limit)

    @app.post("/sessions/{sid}/visuals")
    async def create_visual(sid: str, request: Request):
        body = await request.json()
        session = state.session(sid)
        with state.session_lock(sid):
            dataset = state.engine.run_template(body["template_id"],
                                                body.get("bindings") or {},
                                                session.cache)
            dtype = model_of(dataset)
            vtype = body.get("vtype")
            if vtype is None:
                ranked = score_representations(describe_dataset(dataset))
                vtype = next(v for v, _ in ranked if dtype in COMPATIBLE_DTYPES[v])
            template = state.engine.templates[body["template_id"]]
            visual = session.create_visual(
                vtype, dtype, dataset,
                parameters=default_parameters(vtype, dataset, template.entity_kinds),
                provenance={"kind": "template", "template_id": body["template_id"],
                            "bindings": canonicalize(body.get("bindings") or {})})
            return visual.as_dict()

    @app.post("/sessions/{sid}/visuals/{vid}/interact")
    async def interact(sid: str, vid: int, request: Request):
        body = await request.json()
        session = state.session(sid)
        with state.session_lock(sid):
            new_state = session.interact(vid, body["action"], body.get("args") or {})
            return {"visID": vid, "state": new_state,
                    "graphic": session.visual(vid).graphic}

    @app.post("/sessions/{sid}/visuals/{vid}/annotations")
    async def annotate(sid: str, vid: int, request: Request):
        body = await request.json()
        session = state.session(sid)
        with state.session_lock(sid):
            annotation = session.annotate(vid, body["relation"],
                                          body.get("tuples") or [], body.get("label"))
            return annotation.as_dict()

    @app.post("/sessions/{sid}/visuals/{vid}/derive")
    async def derive(sid: str, vid: int, request: Request):
        body = await request.json()
        session = state.session(sid)
        with state.session_lock(sid):
            try:
                visual = session.derive_visual(vid, body["template_id"],
                                               resolution=body.get("resolution"),
                                               vtype_override=body.get("vtype"))
            except UnresolvedAmbiguity as exc:
                proposal = session.propose_bindings(vid, body["template_id"])
                return JSONResponse(status_code=409, content={
                    "code": exc.code, "message": exc.message,
                    "proposal": proposal.as_dict()})
            return visual.as_dict()

    @app.post("/sessions/{sid}/focus")
    async def focus(sid: str, request: Request):
        body = await request.json()
        session = state.session(sid)
        with state.session_lock(sid):
            visual = session.backtrack(int(body["visID"]))
            return {"focus": visual.vis_id, "state": visual.state,
                    "graphic": visual.graphic}

    @app.post("/analytics/{op}")
    async def analytics(op: str, request: Request):
        body = await request.json() if await request.body() else {}
        return state.run_analytic(op, body)

    @app.get("/sessions/{sid}/export")
    def export_session(sid: str):
        return state.session(sid).export_archive()

    @app.post("/sessions/import")
    async def import_session(request: Request):
        body = await request.json()
        archive = body.get("archive", body)
        session = Session.import_archive(
            archive, state.engine,
            analytic_resolvers={"topics": state._topics_dataset})
        session = state.adopt_session(session)
        return {"session_id": session.session_id, "focus": session.focus,
                "nodes": len(session.visuals)}

    return app
