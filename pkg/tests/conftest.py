from __future__ import annotations

import json

import pytest

from sleuth.ingest import (BurstSpec, SyntheticConfig, TopicCluster, TweetRecord,
                           generate_synthetic_corpus)
from sleuth.queryengine import QueryEngine
from sleuth.store import Store, register_default_views

EPOCH_2019_03_01 = 1551398400  # 2019-03-01T00:00:00Z


def make_record(tweet_id, author, ts, text, hashtags, mentions=(), reply_to=None,
                retweet_of=None):
    return TweetRecord(tweet_id, author, ts, text, list(hashtags), list(mentions),
                       reply_to, retweet_of)


@pytest.fixture
def three_tweet_store():
    """The co-occurrence fixture: t1:(hiv,prep) t2:(hiv,prep) t3:(prep,condomless)."""
    store = Store()
    base = EPOCH_2019_03_01
    store.insert_records([
        make_record("t1", "a1", base + 100, "#hiv #prep info", ["hiv", "prep"]),
        make_record("t2", "a1", base + 3700, "#hiv #prep again", ["hiv", "prep"]),
        make_record("t3", "a2", base + 7300, "#prep #condomless", ["prep", "condomless"]),
    ])
    return store


@pytest.fixture
def synthetic_config():
    return SyntheticConfig(
        authors=20,
        tweets=800,
        clusters=[
            TopicCluster("aware", ["hiv", "prep", "aids", "condomless", "testing"]),
            TopicCluster("offtopic", ["vote", "metoo", "travel"]),
        ],
        time_span=(EPOCH_2019_03_01, EPOCH_2019_03_01 + 86400 * 7),
        bursts=[BurstSpec("awarenessday", EPOCH_2019_03_01 + 86400 * 3,
                          EPOCH_2019_03_01 + 86400 * 3 + 7200, 25.0)],
        hub_author="u0001",
        hub_mention_rate=0.25,
    )


@pytest.fixture
def synthetic_store(synthetic_config):
    store = Store()
    store.insert_records(generate_synthetic_corpus(synthetic_config, seed=13))
    register_default_views(store)
    store.refresh_views()
    return store


@pytest.fixture
def engine(synthetic_store):
    eng = QueryEngine(synthetic_store)
    eng.rebuild_indexes()
    return eng


@pytest.fixture
def corpus_file(tmp_path, synthetic_config):
    from sleuth.ingest import records_to_jsonl
    records = generate_synthetic_corpus(synthetic_config, seed=13)
    path = tmp_path / "corpus.jsonl"
    path.write_text(records_to_jsonl(records), encoding="utf-8")
    return path


def write_jsonl(path, records: list[dict]) -> None:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
