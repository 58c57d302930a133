"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data error, 3 unresolved ambiguity.
Scripted derivations never default silently: an ambiguity without a matching
entry in the --resolve file aborts with exit 3.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..errors import SleuthError, UnresolvedAmbiguity
from ..ingest import (SyntheticConfig, generate_synthetic_corpus, load_corpus,
                      records_to_jsonl)
from ..store import Store, register_default_views
from .state import EngineState

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_AMBIGUITY = 3

# click's default usage exit code is 2; the CLI contract reserves 2 for data errors.
click.UsageError.exit_code = EXIT_USAGE


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text("utf-8"))


def _bootstrap_state(ctx) -> EngineState:
    config = _load_config(ctx.obj.get("config"))
    state = EngineState(include_retweet_hashtags=config.get(
        "include_retweet_hashtags", True))
    store_path = ctx.obj.get("store")
    if store_path:
        state.ingest_file(store_path, config.get("keywords"))
    return state


@click.group()
@click.option("--store", type=click.Path(), default=None,
              help="JSONL corpus backing the in-memory store.")
@click.option("--seed", type=int, default=0, help="RNG seed for seeded operations.")
@click.option("--config", type=click.Path(), default=None,
              help="JSON config with keywords and store toggles.")
@click.pass_context
def main(ctx, store, seed, config):
    """Investigative exploration engine for social-media corpora."""
    ctx.ensure_object(dict)
    ctx.obj.update({"store": store, "seed": seed, "config": config})


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--keywords", default=None, help="Comma-separated keyword filter.")
@click.pass_context
def ingest(ctx, input_path, keywords):
    """Load a JSONL corpus and print its stats."""
    kws = [k.strip().lower() for k in keywords.split(",") if k.strip()] if keywords else None
    try:
        store = Store()
        register_default_views(store)
        stats = load_corpus(input_path, kws, store)
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    _echo_json(stats.as_dict())


@main.command()
@click.option("--config", "synth_config", required=True, type=click.Path(),
              help="Synthetic corpus configuration (JSON).")
@click.option("--output", required=True, type=click.Path())
@click.pass_context
def synth(ctx, synth_config, output):
    """Generate a synthetic corpus deterministically from a config and seed."""
    try:
        cfg = SyntheticConfig.from_json_file(synth_config)
        records = generate_synthetic_corpus(cfg, ctx.obj["seed"])
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    Path(output).write_text(records_to_jsonl(records), encoding="utf-8")
    _echo_json({"records": len(records), "output": output})


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.pass_context
def serve(ctx, host, port):
    """Start the HTTP service; startup ingestion failures exit non-zero."""
    import uvicorn

    from .app import create_app
    try:
        state = _bootstrap_state(ctx)
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    uvicorn.run(create_app(state), host=host, port=port, log_level="warning")


@main.group()
def analyze():
    """Headless analytics over the loaded corpus."""


def _analytic(ctx, op: str, params: dict):
    try:
        state = _bootstrap_state(ctx)
        result = state.run_analytic(op, params)
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    _echo_json(result)


@analyze.command()
@click.option("--series", default="total_tweets")
@click.option("--window", default=25, type=int)
@click.option("--tau", default=3.0, type=float)
@click.option("--min-len", "min_len", default=1, type=int)
@click.option("--k", default=None, type=int, help="Also rank the top-k bursty hashtags.")
@click.pass_context
def bursts(ctx, series, window, tau, min_len, k):
    _analytic(ctx, "bursts", {"series": series, "window": window, "tau": tau,
                              "min_len": min_len, "k": k})


@analyze.command()
@click.option("--seeds", required=True, help="Comma-separated seed hashtags.")
@click.option("--n", default=10, type=int)
@click.option("--min-support", "min_support", default=1, type=int)
@click.pass_context
def expand(ctx, seeds, n, min_support):
    _analytic(ctx, "expand", {"seeds": [s.strip() for s in seeds.split(",") if s.strip()],
                              "n": n, "min_support": min_support})


@analyze.command()
@click.option("--authors", default=None, help="Comma-separated author ids (default: all).")
@click.option("--topics", default=4, type=int)
@click.option("--alpha", default=None, type=float)
@click.option("--beta", default=0.01, type=float)
@click.option("--iterations", default=500, type=int)
@click.option("--top-terms", "top_terms", default=10, type=int)
@click.option("--top-docs", "top_docs", default=10, type=int)
@click.pass_context
def topics(ctx, authors, topics, alpha, beta, iterations, top_terms, top_docs):
    params = {"topics": topics, "alpha": alpha, "beta": beta,
              "iterations": iterations, "seed": ctx.obj["seed"],
              "top_terms": top_terms, "top_docs": top_docs}
    if authors:
        params["authorset"] = [a.strip() for a in authors.split(",") if a.strip()]
    _analytic(ctx, "topics", params)


@analyze.command()
@click.option("--graph", default="mention_graph", help="Graph view name.")
@click.option("--algorithm", type=click.Choice(["pagerank", "betweenness"]),
              default="pagerank")
@click.option("--damping", default=0.85, type=float)
@click.option("--tolerance", default=1e-10, type=float)
@click.option("--max-iterations", "max_iterations", default=200, type=int)
@click.pass_context
def centrality(ctx, graph, algorithm, damping, tolerance, max_iterations):
    _analytic(ctx, "centrality", {"view": graph, "algorithm": algorithm,
                                  "damping": damping, "tolerance": tolerance,
                                  "max_iterations": max_iterations})


@analyze.command()
@click.option("--graph", default="mention_graph")
@click.option("--percentile", default=0.1, type=float)
@click.option("--damping", default=0.85, type=float)
@click.pass_context
def influencers(ctx, graph, percentile, damping):
    _analytic(ctx, "influencers", {"view": graph, "percentile": percentile,
                                   "damping": damping})


@main.group()
def session():
    """Headless exploration sessions."""


def _run_script(state: EngineState, script: dict, resolutions: dict) -> dict:
    sess = state.new_session()
    named: dict[str, int] = {"root": 0}
    outputs = []

    def vis_ref(ref) -> int:
        if isinstance(ref, str) and ref.startswith("$"):
            name = ref[1:]
            if name not in named:
                raise SleuthError(f"script references unknown visual {ref!r}")
            return named[name]
        return int(ref)

    for index, step in enumerate(script.get("steps", [])):
        action = step.get("action")
        step_resolution = dict(step.get("resolution") or {})
        step_resolution.update(resolutions.get(str(index), {}))
        if action == "create":
            dataset = state.engine.run_template(step["template"],
                                                step.get("bindings") or {}, sess.cache)
            from ..explore import describe_dataset, model_of
            from ..explore.scoring import score_representations
            from ..explore.visuals import COMPATIBLE_DTYPES, default_parameters
            dtype = model_of(dataset)
            vtype = step.get("vtype")
            if vtype is None:
                ranked = score_representations(describe_dataset(dataset))
                vtype = next(v for v, _ in ranked if dtype in COMPATIBLE_DTYPES[v])
            template = state.engine.templates[step["template"]]
            visual = sess.create_visual(
                vtype, dtype, dataset,
                parameters=default_parameters(vtype, dataset, template.entity_kinds))
            outputs.append({"step": index, "visID": visual.vis_id, "vType": vtype})
        elif action == "derive":
            try:
                visual = sess.derive_visual(vis_ref(step["from"]), step["template"],
                                            resolution=step_resolution or None,
                                            vtype_override=step.get("vtype"))
            except UnresolvedAmbiguity as exc:
                proposal = sess.propose_bindings(vis_ref(step["from"]), step["template"])
                _echo_json({"error": exc.as_dict(), "step": index,
                            "proposal": proposal.as_dict()})
                sys.exit(EXIT_AMBIGUITY)
            outputs.append({"step": index, "visID": visual.vis_id, "vType": visual.vtype})
        elif action == "interact":
            new_state = sess.interact(vis_ref(step["vis"]), step["name"],
                                      step.get("args") or {})
            outputs.append({"step": index, "state": new_state})
        elif action == "annotate":
            ann = sess.annotate(vis_ref(step["vis"]), step["relation"],
                                step.get("tuples") or [], step.get("label"))
            outputs.append({"step": index, "annotation_id": ann.annotation_id})
        elif action == "backtrack":
            visual = sess.backtrack(vis_ref(step["to"]))
            outputs.append({"step": index, "focus": visual.vis_id})
        elif action == "analytic":
            result = state.run_analytic(step["op"], step.get("params") or {})
            outputs.append({"step": index, "result": result})
        else:
            raise SleuthError(f"unknown script action {action!r}")
        if step.get("save_as"):
            last_vis = outputs[-1].get("visID")
            if last_vis is not None:
                named[step["save_as"]] = last_vis
    return {"session_id": sess.session_id, "steps": outputs, "tree": sess.tree(),
            "archive": sess.export_archive()}


@session.command("run-script")
@click.option("--script", "script_path", required=True, type=click.Path())
@click.option("--resolve", "resolve_path", default=None, type=click.Path(),
              help="JSON map of step index -> parameter resolutions.")
@click.option("--export", "export_path", default=None, type=click.Path())
@click.pass_context
def run_script(ctx, script_path, resolve_path, export_path):
    """Execute a scripted exploration; ambiguities fail with exit 3 unless resolved."""
    try:
        state = _bootstrap_state(ctx)
        script = json.loads(Path(script_path).read_text("utf-8"))
        resolutions = json.loads(Path(resolve_path).read_text("utf-8")) if resolve_path else {}
        result = _run_script(state, script, resolutions)
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    if export_path:
        Path(export_path).write_text(json.dumps(result["archive"]), encoding="utf-8")
    _echo_json({"session_id": result["session_id"], "steps": result["steps"],
                "focus": result["tree"]["focus"],
                "nodes": len(result["tree"]["nodes"])})


@session.command("export")
@click.option("--script", "script_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def session_export(ctx, script_path, out_path):
    """Run a script and write the resulting session archive."""
    try:
        state = _bootstrap_state(ctx)
        script = json.loads(Path(script_path).read_text("utf-8"))
        result = _run_script(state, script, {})
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    Path(out_path).write_text(json.dumps(result["archive"]), encoding="utf-8")
    _echo_json({"exported": out_path, "nodes": len(result["tree"]["nodes"])})


@session.command("import")
@click.option("--archive", "archive_path", required=True, type=click.Path())
@click.pass_context
def session_import(ctx, archive_path):
    """Import a session archive and print its tree."""
    from ..explore import Session
    try:
        state = _bootstrap_state(ctx)
        raw = Path(archive_path).read_text("utf-8")
        sess = Session.import_archive(raw, state.engine)
        state.adopt_session(sess)
    except SleuthError as exc:
        _echo_json(exc.as_dict())
        sys.exit(EXIT_DATA)
    _echo_json(sess.tree())


if __name__ == "__main__":
    main()
