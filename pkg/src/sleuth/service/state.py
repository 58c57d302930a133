"""Process-wide engine state shared by the HTTP app and the CLI.

Ingestion and view refresh take a global writer lock; work on one session is
serialized through a per-session lock while distinct sessions proceed
concurrently.
"""

from __future__ import annotations

import threading

from ..analytics import (betweenness, bursty_hashtags, cooccurrence_expand, detect_bursts,
                         influencers, ks_statistic, lda_fit, pagerank, topic_divergence,
                         topic_outputs)
from ..analytics.bursts import BurstInterval
from ..errors import (EmptyGraph, InvalidArguments, SleuthError, UnknownSession,
                      UnknownVisID)
from ..explore import Session, TopicBundle
from ..ingest import SyntheticConfig, generate_synthetic_corpus, load_corpus
from ..queryengine import QueryEngine
from ..store import PropertyGraph, Store, Table, register_default_views
from ..textutil import content_tokens


class EngineState:
    def __init__(self, include_retweet_hashtags: bool = True):
        self.store = Store(include_retweet_hashtags=include_retweet_hashtags)
        register_default_views(self.store)
        self.engine = QueryEngine(self.store)
        self.sessions: dict[str, Session] = {}
        self.ready = False
        self._counter = 0
        self.write_lock = threading.RLock()
        self._session_locks: dict[str, threading.Lock] = {}

    # --- data lifecycle -----------------------------------------------------

    def ingest_file(self, path, keywords=None):
        with self.write_lock:
            stats = load_corpus(path, keywords, self.store)
            self.refresh()
            return stats

    def ingest_synthetic(self, config: dict | SyntheticConfig, seed: int):
        if isinstance(config, dict):
            config = SyntheticConfig.from_dict(config)
        records = generate_synthetic_corpus(config, seed)
        with self.write_lock:
            self.store.insert_records(records)
            self.refresh()
        return {"records": len(records)}

    def refresh(self):
        with self.write_lock:
            report = self.store.refresh_views()
            self.engine.rebuild_indexes()
            self.ready = True
            return report

    # --- sessions --------------------------------------------------------------

    def new_session(self) -> Session:
        self._counter += 1
        session_id = f"s{self._counter}"
        session = Session(session_id, self.engine,
                          analytic_resolvers={"topics": self._topics_dataset})
        self.sessions[session_id] = session
        self._session_locks[session_id] = threading.Lock()
        return session

    def adopt_session(self, session: Session) -> Session:
        self._counter += 1
        session_id = f"s{self._counter}"
        session.session_id = session_id
        self.sessions[session_id] = session
        self._session_locks[session_id] = threading.Lock()
        return session

    def session(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    def session_lock(self, session_id: str) -> threading.Lock:
        return self._session_locks.setdefault(session_id, threading.Lock())

    # --- analytics operations ----------------------------------------------------

    def run_analytic(self, op: str, params: dict) -> dict:
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            raise InvalidArguments(f"unknown analytics operation {op!r}")
        return handler(params or {})

    def _op_bursts(self, params: dict) -> dict:
        series = self.store.view(params.get("series", "total_tweets"))
        interval = params.get("interval")
        if interval:
            series = series.slice(int(interval[0]), int(interval[1]))
        intervals = detect_bursts(series,
                                  window=int(params.get("window", 25)),
                                  tau=float(params.get("tau", 3.0)),
                                  min_len=int(params.get("min_len", 1)))
        result = {"intervals": [iv.as_dict() for iv in intervals]}
        k = params.get("k")
        if k and intervals:
            ranked = bursty_hashtags(intervals, int(k), self.store)
            result["hashtags"] = [{"hashtag": h, "burst_ratio": r} for h, r in ranked.rows]
        return result

    def _op_expand(self, params: dict) -> dict:
        table = cooccurrence_expand(params.get("seeds") or (),
                                    int(params.get("n", 10)),
                                    int(params.get("min_support", 1)),
                                    self.store)
        return {"expansion": [{"hashtag": h, "cooccurrence_count": c}
                              for h, c in table.rows]}

    def _topic_docs(self, params: dict) -> tuple[list[str], list[list[str]]]:
        """Resolve topic-model input documents (ids + token lists)."""
        if params.get("docs"):
            docs = [content_tokens(d) if isinstance(d, str) else list(d)
                    for d in params["docs"]]
            return [f"d{i}" for i in range(len(docs))], docs
        tweets = self.store.tables["tweets"]
        ti, ai, xi = (tweets.col_index("tweet_id"), tweets.col_index("author_id"),
                      tweets.col_index("text"))
        if params.get("session_id") is not None and params.get("visID") is not None:
            session = self.session(params["session_id"])
            dataset = session.dataset_of(int(params["visID"]))
            if not isinstance(dataset, Table) or "text" not in dataset.column_names():
                raise InvalidArguments("visual's dataset has no text column")
            di = dataset.col_index("text")
            ii = dataset.col_index("tweet_id")
            pairs = [(row[ii], content_tokens(row[di])) for row in dataset.rows]
        elif params.get("authorset"):
            authors = set(params["authorset"])
            pairs = [(row[ti], content_tokens(row[xi]))
                     for row in tweets.rows if row[ai] in authors]
        else:
            pairs = [(row[ti], content_tokens(row[xi])) for row in tweets.rows]
        pairs = [(doc_id, toks) for doc_id, toks in pairs if toks]
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def _topics_bundle(self, params: dict) -> TopicBundle:
        doc_ids, docs = self._topic_docs(params)
        k = int(params.get("topics", 4))
        model = lda_fit(docs, k,
                        alpha=params.get("alpha"),
                        beta=float(params.get("beta", 0.01)),
                        iterations=int(params.get("iterations", 500)),
                        seed=int(params.get("seed", 0)))
        terms, top_docs, corr = topic_outputs(model,
                                              int(params.get("top_terms", 10)),
                                              int(params.get("top_docs", 10)))
        divergence = topic_divergence(model)
        topics = []
        for topic in range(model.K):
            topics.append({
                "topic": topic,
                "terms": [[t, w] for t, w in terms[topic]],
                "docs": [[doc_ids[d], w] for d, w in top_docs[topic]],
            })
        return TopicBundle(
            params={"topics": model.K, "alpha": model.alpha, "beta": model.beta,
                    "iterations": int(params.get("iterations", 500)), "seed": model.seed},
            topics=topics,
            correlation=[[float(v) for v in row] for row in corr],
            divergence=[[float(v) for v in row] for row in divergence],
        )

    def _topics_dataset(self, args: dict):
        return self._topics_bundle(args)

    def _op_topics(self, params: dict) -> dict:
        bundle = self._topics_bundle(params)
        result = {"topics": bundle.topics, "correlation": bundle.correlation,
                  "divergence": bundle.divergence, "params": bundle.params}
        if params.get("register") and params.get("session_id"):
            session = self.session(params["session_id"])
            parent = params.get("parent")
            clean_args = {k: v for k, v in params.items()
                          if k not in ("register", "session_id", "parent")}
            visual = session.create_visual(
                "topicView", "document", bundle,
                provenance={"kind": "analytic", "op": "topics", "args": clean_args},
                parent=int(parent) if parent is not None else None)
            result["visID"] = visual.vis_id
        return result

    def _resolve_graph(self, params: dict) -> PropertyGraph:
        if params.get("view"):
            graph = self.store.view(params["view"])
        elif params.get("session_id") is not None and params.get("visID") is not None:
            session = self.session(params["session_id"])
            graph = session.dataset_of(int(params["visID"]))
        else:
            raise InvalidArguments("graph source needs 'view' or 'session_id'+'visID'")
        if not isinstance(graph, PropertyGraph):
            raise InvalidArguments("referenced dataset is not a graph")
        if graph.node_count() == 0:
            raise EmptyGraph("graph has no nodes")
        return graph

    def _op_centrality(self, params: dict) -> dict:
        graph = self._resolve_graph(params)
        algorithm = params.get("algorithm", "pagerank")
        if algorithm == "pagerank":
            scores = pagerank(graph,
                              damping=float(params.get("damping", 0.85)),
                              tolerance=float(params.get("tolerance", 1e-10)),
                              max_iterations=int(params.get("max_iterations", 200)))
        elif algorithm == "betweenness":
            scores = betweenness(graph)
        else:
            raise InvalidArguments(f"unknown centrality algorithm {algorithm!r}")
        return {"algorithm": scores.algorithm,
                "converged": scores.converged,
                "scores": dict(sorted(scores.scores.items()))}

    def _op_influencers(self, params: dict) -> dict:
        graph = self._resolve_graph(params)
        report = influencers(graph,
                             percentile=float(params.get("percentile", 0.1)),
                             damping=float(params.get("damping", 0.85)),
                             tolerance=float(params.get("tolerance", 1e-10)),
                             max_iterations=int(params.get("max_iterations", 200)))
        return report.as_dict()

    def _op_compare(self, params: dict) -> dict:
        return {"ks": ks_statistic(params.get("left") or [], params.get("right") or [])}
