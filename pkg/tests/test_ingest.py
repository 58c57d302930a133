from __future__ import annotations

import calendar
import json

import pytest

from sleuth.errors import EmptyCorpus, FileNotFound, InvalidConfig, MalformedRecord
from sleuth.ingest import (SyntheticConfig, TopicCluster, BurstSpec, generate_synthetic_corpus,
                           keyword_filter, load_corpus, parse_tweet_record,
                           records_to_jsonl)
from sleuth.store import Store

from .conftest import EPOCH_2019_03_01, make_record, write_jsonl


def line(**kwargs) -> str:
    base = {"id": "t1", "author_id": "a1", "created_at": 1551435300,
            "text": "hello world"}
    base.update(kwargs)
    return json.dumps(base)


class TestParseTweetRecord:
    def test_hashtags_normalized_and_deduped(self):
        rec = parse_tweet_record(line(text="Get #PrEP now #prep"))
        assert rec.hashtags == ["prep"]

    def test_explicit_hashtags_override_extraction(self):
        rec = parse_tweet_record(line(text="no tags here", hashtags=["#HIV", "Prep"]))
        assert rec.hashtags == ["hiv", "prep"]

    def test_missing_tweet_id_rejected(self):
        payload = json.loads(line())
        del payload["id"]
        with pytest.raises(MalformedRecord):
            parse_tweet_record(json.dumps(payload))

    def test_iso_timestamp_epoch_conversion(self):
        # Independent oracle: calendar.timegm over the parsed struct.
        expected = calendar.timegm((2019, 3, 1, 10, 15, 0))
        rec = parse_tweet_record(line(created_at="2019-03-01T10:15:00Z"))
        assert expected == 1551435300
        assert rec.created_at == expected

    def test_epoch_passthrough(self):
        assert parse_tweet_record(line(created_at=1551435300)).created_at == 1551435300

    def test_unparseable_timestamp(self):
        with pytest.raises(MalformedRecord):
            parse_tweet_record(line(created_at="yesterday-ish"))

    def test_negative_timestamp(self):
        with pytest.raises(MalformedRecord):
            parse_tweet_record(line(created_at=-5))

    def test_invalid_json(self):
        with pytest.raises(MalformedRecord):
            parse_tweet_record("{not json")

    def test_hashtag_invariants(self):
        rec = parse_tweet_record(line(text="#A1 #a1 #B2 plain"))
        assert all(t and t == t.lower() and "#" not in t for t in rec.hashtags)


class TestKeywordFilter:
    def test_token_match(self):
        rec = make_record("t", "a", 0, "HIV testing today", [])
        assert keyword_filter(rec, ["hiv"]) is True

    def test_substring_does_not_match(self):
        rec = make_record("t", "a", 0, "shiver", [])
        assert keyword_filter(rec, ["hiv"]) is False

    def test_hashtag_match_clause(self):
        rec = make_record("t", "a", 0, "totally unrelated", ["prep"])
        assert keyword_filter(rec, ["prep"]) is True


class TestLoadCorpus:
    def test_three_line_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [json.loads(line(id=f"t{i}")) for i in range(3)])
        stats = load_corpus(path, store=Store())
        assert stats.records_kept == 3
        assert stats.records_read == 3
        assert stats.records_rejected == 0

    def test_malformed_line_counted_not_fatal(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text(line(id="t1") + "\n{broken\n" + line(id="t2") + "\n")
        stats = load_corpus(path, store=Store())
        assert (stats.records_kept, stats.records_rejected) == (2, 1)
        assert stats.records_kept + stats.records_rejected == stats.records_read

    def test_no_keyword_match_is_empty_corpus(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [json.loads(line())])
        with pytest.raises(EmptyCorpus):
            load_corpus(path, keywords=["zika"], store=Store())

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFound):
            load_corpus(tmp_path / "nope.jsonl", store=Store())

    def test_kept_records_all_pass_filter(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [
            json.loads(line(id="t1", text="talking about hiv")),
            json.loads(line(id="t2", text="cooking pasta")),
            json.loads(line(id="t3", text="PreP available", hashtags=["prep"])),
        ])
        store = Store()
        stats = load_corpus(path, keywords=["hiv", "prep"], store=store)
        assert stats.records_kept == 2
        assert stats.records_rejected == 1

    def test_deterministic_reingest(self, corpus_file):
        s1, s2 = Store(), Store()
        load_corpus(corpus_file, store=s1)
        load_corpus(corpus_file, store=s2)
        for name in s1.tables:
            assert s1.tables[name].rows == s2.tables[name].rows

    def test_author_counts_sum_to_kept(self, corpus_file):
        store = Store()
        stats = load_corpus(corpus_file, store=store)
        total = sum(store.tables["authors"].values("tweet_count"))
        assert total == stats.records_kept


class TestSyntheticCorpus:
    def test_same_seed_byte_identical(self, synthetic_config):
        a = records_to_jsonl(generate_synthetic_corpus(synthetic_config, seed=99))
        b = records_to_jsonl(generate_synthetic_corpus(synthetic_config, seed=99))
        assert a == b

    def test_different_seed_differs(self, synthetic_config):
        a = records_to_jsonl(generate_synthetic_corpus(synthetic_config, seed=1))
        b = records_to_jsonl(generate_synthetic_corpus(synthetic_config, seed=2))
        assert a != b

    def test_burst_injection_raises_hourly_count(self, synthetic_config):
        # Oracle: independent scan of the generated output.
        records = generate_synthetic_corpus(synthetic_config, seed=99)
        burst = synthetic_config.bursts[0]
        hours_in = (burst.end - burst.start) // 3600
        in_burst = sum(1 for r in records
                       if burst.tag in r.hashtags and burst.start <= r.created_at < burst.end)
        out_burst = sum(1 for r in records
                        if burst.tag in r.hashtags and not
                        burst.start <= r.created_at < burst.end)
        span_hours = (synthetic_config.time_span[1] - synthetic_config.time_span[0]) // 3600
        base_rate = max(out_burst / (span_hours - hours_in), 1e-9)
        burst_rate = in_burst / hours_in
        assert burst_rate >= 0.5 * burst.multiplier * base_rate

    def test_zero_tweets_invalid(self, synthetic_config):
        cfg = SyntheticConfig(authors=5, tweets=0, clusters=synthetic_config.clusters,
                              time_span=synthetic_config.time_span)
        with pytest.raises(InvalidConfig):
            generate_synthetic_corpus(cfg, seed=0)

    def test_zero_authors_invalid(self, synthetic_config):
        cfg = SyntheticConfig(authors=0, tweets=5, clusters=synthetic_config.clusters,
                              time_span=synthetic_config.time_span)
        with pytest.raises(InvalidConfig):
            generate_synthetic_corpus(cfg, seed=0)

    def test_config_json_round_trip(self, tmp_path):
        payload = {
            "authors": 4, "tweets": 40,
            "clusters": [{"name": "x", "tags": ["a", "b"]}],
            "time_span": [EPOCH_2019_03_01, EPOCH_2019_03_01 + 3600 * 50],
            "bursts": [{"tag": "zz", "start": EPOCH_2019_03_01,
                        "end": EPOCH_2019_03_01 + 3600, "multiplier": 5}],
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        cfg = SyntheticConfig.from_json_file(path)
        records = generate_synthetic_corpus(cfg, seed=3)
        assert len(records) >= 40
        assert all(r.created_at >= EPOCH_2019_03_01 for r in records)
