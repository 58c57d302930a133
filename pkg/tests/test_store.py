from __future__ import annotations

import pytest

from sleuth.errors import DuplicateViewId, InvalidViewDef, QuerySyntaxError
from sleuth.store import (InvertedIndex, MaterializedViewDef, Store, Table,
                          register_default_views, text_search)
from sleuth.textutil import content_tokens, stopwords

from .conftest import EPOCH_2019_03_01, make_record


class TestTableInvariants:
    def test_row_arity_enforced(self):
        t = Table("x", [("a", "categorical"), ("b", "continuous")])
        with pytest.raises(Exception):
            t.append(("only-one",))

    def test_duplicate_columns_rejected(self):
        with pytest.raises(Exception):
            Table("x", [("a", "categorical"), ("a", "continuous")])


class TestViews:
    def test_hourly_counts_one_point_per_nonempty_hour(self, three_tweet_store):
        vdef = MaterializedViewDef("hourly", {
            "expr": "time_bucket_count", "table": "tweets",
            "time_column": "created_at", "granularity": "hour"}, "timeseries")
        three_tweet_store.register_view(vdef)
        series = three_tweet_store.view("hourly")
        assert [v for _, v in series.points] == [1.0, 1.0, 1.0]
        assert all(ts % 3600 == 0 for ts, _ in series.points)

    def test_duplicate_view_id(self, three_tweet_store):
        vdef = MaterializedViewDef("v", {"expr": "group_count", "table": "hashtag_use",
                                         "by": ["tag"]}, "relational")
        three_tweet_store.register_view(vdef)
        with pytest.raises(DuplicateViewId):
            three_tweet_store.register_view(vdef)

    def test_cooccurrence_counts_fixture(self, three_tweet_store):
        # Brute-force pair enumeration over the 3-tweet fixture gives (hiv, prep) -> 2.
        vdef = MaterializedViewDef("pairs", {
            "expr": "pair_count", "table": "hashtag_use",
            "group_column": "tweet_id", "value_column": "tag"}, "relational")
        three_tweet_store.register_view(vdef)
        rows = three_tweet_store.view("pairs").rows
        assert ("hiv", "prep", 2) in rows
        assert ("condomless", "prep", 1) in rows

    def test_invalid_view_defs(self, three_tweet_store):
        with pytest.raises(InvalidViewDef):
            three_tweet_store.register_view(MaterializedViewDef(
                "bad1", {"expr": "nope", "table": "tweets"}, "relational"))
        with pytest.raises(InvalidViewDef):
            three_tweet_store.register_view(MaterializedViewDef(
                "bad2", {"expr": "group_count", "table": "missing", "by": ["x"]},
                "relational"))
        with pytest.raises(InvalidViewDef):
            three_tweet_store.register_view(MaterializedViewDef(
                "bad3", {"expr": "group_count", "table": "hashtag_use", "by": ["tag"]},
                "graph"))

    def test_refresh_updates_affected_bucket(self, three_tweet_store):
        store = three_tweet_store
        register_default_views(store)
        store.refresh_views()
        before = dict(store.view("total_tweets").points)
        ts = EPOCH_2019_03_01 + 100
        store.insert_records([make_record("t9", "a1", ts, "#hiv more", ["hiv"])])
        store.refresh_views()
        after = dict(store.view("total_tweets").points)
        bucket = ts - ts % 3600
        assert after[bucket] == before[bucket] + 1

    def test_refresh_no_change_is_identical(self, synthetic_store):
        first = {vid: synthetic_store.view(vid) for vid in synthetic_store.view_defs}
        synthetic_store.refresh_views()
        for vid, old in first.items():
            new = synthetic_store.view(vid)
            if isinstance(old, Table):
                assert old.rows == new.rows
            elif hasattr(old, "points"):
                assert old.points == new.points
            else:
                assert sorted(old.nodes) == sorted(new.nodes)
                assert len(old.edges) == len(new.edges)

    def test_refresh_report_lists_all_views(self, synthetic_store):
        report = synthetic_store.refresh_views()
        assert {e["view_id"] for e in report.entries} == set(synthetic_store.view_defs)

    def test_view_equals_independent_recompute(self, synthetic_store):
        # Independent scan: hourly histogram of the tweets table.
        counts = {}
        for ts in synthetic_store.tables["tweets"].values("created_at"):
            counts[ts - ts % 3600] = counts.get(ts - ts % 3600, 0) + 1
        series = synthetic_store.view("total_tweets")
        assert dict(series.points) == {k: float(v) for k, v in counts.items()}


def build_index(docs: dict[str, str], tags: dict[str, list] | None = None) -> InvertedIndex:
    index = InvertedIndex()
    for doc_id in sorted(docs):
        index.add_document(doc_id, docs[doc_id], (tags or {}).get(doc_id, ()))
    index.finalize()
    index.validate()
    return index


class TestTextSearch:
    DOCS = {"d1": "hiv prep", "d2": "hiv", "d3": "prep"}

    def test_implicit_and(self):
        index = build_index(self.DOCS)
        assert [d for d, _ in text_search(index, "hiv prep")] == ["d1"]

    def test_or_clause(self):
        index = build_index(self.DOCS)
        assert {d for d, _ in text_search(index, "hiv OR prep")} == {"d1", "d2", "d3"}

    def test_negation(self):
        index = build_index(self.DOCS)
        assert [d for d, _ in text_search(index, "hiv -prep")] == ["d2"]

    def test_phrase(self):
        index = build_index({"d1": "stop hiv now", "d2": "hiv stop now", "d3": "stop hiv"})
        assert {d for d, _ in text_search(index, '"stop hiv"')} == {"d1", "d3"}

    def test_tag_clause(self):
        index = build_index(self.DOCS, tags={"d1": ["prep"], "d2": ["hiv"]})
        assert [d for d, _ in text_search(index, "tag:prep")] == ["d1"]

    def test_ranking_ties_by_doc_id(self):
        index = build_index({"b": "x", "a": "x", "c": "x y"})
        results = text_search(index, "x")
        assert [d for d, _ in results] == ["a", "b", "c"]

    def test_syntax_errors(self):
        index = build_index(self.DOCS)
        for bad in ["", '"unterminated', "OR x", "hiv OR", "-", "tag:"]:
            with pytest.raises(QuerySyntaxError):
                text_search(index, bad)

    def test_case_insensitive(self):
        index = build_index(self.DOCS)
        assert [d for d, _ in text_search(index, "HIV PREP")] == ["d1"]

    def test_matches_linear_scan_oracle(self):
        import random
        rng = random.Random(7)
        vocab = ["hiv", "prep", "aids", "care", "test", "city"]
        docs = {f"d{i:03d}": " ".join(rng.choices(vocab, k=rng.randint(1, 6)))
                for i in range(120)}
        index = build_index(docs)
        stop = stopwords()

        def scan_and(terms):
            return {d for d, text in docs.items()
                    if all(t in text.split() for t in terms if t not in stop)}

        for terms in (["hiv"], ["hiv", "prep"], ["care", "test", "city"]):
            got = {d for d, _ in text_search(index, " ".join(terms))}
            assert got == scan_and(terms)

        neg = {d for d, _ in text_search(index, "hiv -prep")}
        assert neg == {d for d, t in docs.items()
                       if "hiv" in t.split() and "prep" not in t.split()}

    def test_tfidf_ranking_descends(self):
        index = build_index({"d1": "prep prep prep", "d2": "prep", "d3": "prep prep"})
        results = text_search(index, "prep")
        scores = [s for _, s in results]
        assert scores == sorted(scores, reverse=True)
        assert [d for d, _ in results] == ["d1", "d3", "d2"]


class TestTextIndexOnStore:
    def test_store_index_covers_tweets(self, three_tweet_store):
        index = three_tweet_store.text_index()
        assert index.doc_count == 3
        hits = text_search(index, "tag:condomless")
        assert [d for d, _ in hits] == ["t3"]

    def test_index_rebuilt_after_mutation(self, three_tweet_store):
        store = three_tweet_store
        store.text_index()
        store.insert_records([make_record("t4", "a3", EPOCH_2019_03_01 + 9000,
                                          "new #topic", ["topic"])])
        assert store.text_index().doc_count == 4


def test_content_tokens_strip_stopwords():
    toks = content_tokens("The HIV test and the PrEP")
    assert toks == ["hiv", "test", "prep"]
