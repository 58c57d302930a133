"""The in-memory multi-model store: base tables, views, text index.

Base tables form a fixed canonical set (tweets, authors, hashtag_use,
mention_edges).  Views are full-recompute only and swap atomically; nothing
is maintained incrementally.  A monotonically increasing version number
marks every mutation so indexes built elsewhere can detect staleness.
"""

from __future__ import annotations

import time

from ..errors import DuplicateViewId
from .graphmap import GraphMappingSpec, build_graph_from_relation
from .tables import Table
from .textindex import InvertedIndex
from .views import (MaterializedViewDef, RefreshReport, compute_view,
                    result_size, validate_view_def)

BASE_SCHEMAS = {
    "tweets": [
        ("tweet_id", "identifier"), ("author_id", "identifier"),
        ("created_at", "temporal"), ("text", "text"),
        ("reply_to", "identifier"), ("retweet_of", "identifier"),
    ],
    "authors": [("author_id", "identifier"), ("tweet_count", "continuous")],
    "hashtag_use": [
        ("tweet_id", "identifier"), ("author_id", "identifier"),
        ("tag", "categorical"), ("created_at", "temporal"),
    ],
    "mention_edges": [
        ("src_author", "identifier"), ("dst_author", "identifier"),
        ("tweet_id", "identifier"), ("created_at", "temporal"),
    ],
}


class Store:
    def __init__(self, include_retweet_hashtags: bool = True):
        self.include_retweet_hashtags = include_retweet_hashtags
        self.version = 0
        self.tables: dict[str, Table] = {
            name: Table(name, list(schema)) for name, schema in BASE_SCHEMAS.items()
        }
        self.view_defs: dict[str, MaterializedViewDef] = {}
        self.view_data: dict[str, object] = {}
        self._text_index: InvertedIndex | None = None
        self._text_index_version = -1

    # --- base data -----------------------------------------------------

    def insert_records(self, records) -> int:
        """Append parsed records to the base tables, one mutation step."""
        tweets = self.tables["tweets"]
        tag_use = self.tables["hashtag_use"]
        mentions = self.tables["mention_edges"]
        counts: dict[str, int] = {}
        for aid, n in self.tables["authors"].rows:
            counts[aid] = int(n)
        for rec in records:
            tweets.append((rec.tweet_id, rec.author_id, rec.created_at, rec.text,
                           rec.reply_to, rec.retweet_of))
            counts[rec.author_id] = counts.get(rec.author_id, 0) + 1
            if self.include_retweet_hashtags or rec.retweet_of is None:
                for tag in rec.hashtags:
                    tag_use.append((rec.tweet_id, rec.author_id, tag, rec.created_at))
            for target in rec.mentions:
                mentions.append((rec.author_id, target, rec.tweet_id, rec.created_at))
        authors = Table("authors", list(BASE_SCHEMAS["authors"]),
                        [(aid, counts[aid]) for aid in sorted(counts)])
        self.tables["authors"] = authors
        self.version += 1
        return len(list(records))

    # --- materialized views ---------------------------------------------

    def register_view(self, vdef: MaterializedViewDef) -> str:
        if vdef.view_id in self.view_defs:
            raise DuplicateViewId(f"view {vdef.view_id!r} already registered")
        validate_view_def(vdef, self.tables)
        self.view_defs[vdef.view_id] = vdef
        self.view_data[vdef.view_id] = compute_view(vdef, self.tables)
        return vdef.view_id

    def refresh_views(self) -> RefreshReport:
        """Recompute every view from base tables; swap all results atomically."""
        report = RefreshReport()
        started = time.perf_counter()
        staging: dict[str, object] = {}
        for view_id, vdef in self.view_defs.items():
            t0 = time.perf_counter()
            staging[view_id] = compute_view(vdef, self.tables)
            report.add(view_id, vdef.target_model, result_size(staging[view_id]),
                       (time.perf_counter() - t0) * 1000.0)
        self.view_data = staging
        self._rebuild_text_index()
        report.duration_ms = (time.perf_counter() - started) * 1000.0
        return report

    def view(self, view_id: str):
        if view_id not in self.view_data:
            raise KeyError(f"view {view_id!r} not registered")
        return self.view_data[view_id]

    # --- text index -------------------------------------------------------

    def text_index(self) -> InvertedIndex:
        if self._text_index is None or self._text_index_version != self.version:
            self._rebuild_text_index()
        return self._text_index

    def _rebuild_text_index(self) -> None:
        index = InvertedIndex()
        tweets = self.tables["tweets"]
        tags_by_tweet: dict[str, set[str]] = {}
        for tweet_id, _, tag, _ in self.tables["hashtag_use"].rows:
            tags_by_tweet.setdefault(tweet_id, set()).add(tag)
        ti, xi = tweets.col_index("tweet_id"), tweets.col_index("text")
        for row in tweets.rows:
            index.add_document(row[ti], row[xi], tags_by_tweet.get(row[ti], ()))
        index.finalize()
        self._text_index = index
        self._text_index_version = self.version

    # --- model transformation ---------------------------------------------

    def build_graph(self, spec: GraphMappingSpec):
        return build_graph_from_relation(spec, self.tables)

    # --- convenience -------------------------------------------------------

    def stats(self) -> dict:
        tweets = self.tables["tweets"]
        ts = tweets.values("created_at")
        return {
            "tweets": len(tweets),
            "authors": len(self.tables["authors"]),
            "hashtags": self.tables["hashtag_use"].distinct_count("tag") if len(
                self.tables["hashtag_use"]) else 0,
            "mentions": len(self.tables["mention_edges"]),
            "time_span": [min(ts), max(ts)] if ts else None,
            "views": sorted(self.view_defs),
            "version": self.version,
        }


MENTION_GRAPH_MAPPING = {
    "nodes": [
        {"table": "authors", "id_column": "author_id", "label": "author",
         "property_columns": ["tweet_count"]},
    ],
    "edges": [
        {"table": "mention_edges", "source_column": "src_author",
         "target_column": "dst_author", "label": "mentions",
         "property_columns": ["tweet_id", "created_at"],
         "source_label": "author", "target_label": "author"},
    ],
    "directed": True,
}

DEFAULT_VIEW_DEFS = [
    {
        "view_id": "total_tweets",
        "source": {"expr": "time_bucket_count", "table": "tweets",
                   "time_column": "created_at", "granularity": "hour"},
        "target_model": "timeseries",
        "description": "hourly tweet counts",
    },
    {
        "view_id": "hashtag_counts",
        "source": {"expr": "group_count", "table": "hashtag_use", "by": ["tag"],
                   "as": {"tag": "hashtag"}, "count_column": "tweet_count"},
        "target_model": "relational",
        "description": "tweets per hashtag",
    },
    {
        "view_id": "tag_pairs",
        "source": {"expr": "pair_count", "table": "hashtag_use",
                   "group_column": "tweet_id", "value_column": "tag",
                   "pair_names": ["tag_a", "tag_b"]},
        "target_model": "relational",
        "description": "hashtag co-occurrence counts",
    },
    {
        "view_id": "mention_graph",
        "source": {"expr": "graph_map", "mapping": MENTION_GRAPH_MAPPING},
        "target_model": "graph",
        "description": "author mention network",
    },
]


def register_default_views(store: Store) -> None:
    for data in DEFAULT_VIEW_DEFS:
        store.register_view(MaterializedViewDef.from_dict(data))
