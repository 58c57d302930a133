"""Corpus ingestion: JSONL parsing, keyword filtering, synthetic generation.

Social-media dumps are dirty; malformed lines are logged with their line
number and counted, never abort a load.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import EmptyCorpus, FileNotFound, InvalidConfig, MalformedRecord
from .textutil import dedupe_keep_order, extract_hashtags, tokenize

logger = logging.getLogger(__name__)


@dataclass
class TweetRecord:
    tweet_id: str
    author_id: str
    created_at: int  # UTC epoch seconds
    text: str
    hashtags: list[str] = field(default_factory=list)
    mentions: list[str] = field(default_factory=list)
    reply_to: str | None = None
    retweet_of: str | None = None


@dataclass
class CorpusStats:
    records_read: int = 0
    records_kept: int = 0
    records_rejected: int = 0
    distinct_authors: int = 0
    distinct_hashtags: int = 0
    time_span: tuple[int, int] | None = None

    def as_dict(self) -> dict:
        return {
            "records_read": self.records_read,
            "records_kept": self.records_kept,
            "records_rejected": self.records_rejected,
            "distinct_authors": self.distinct_authors,
            "distinct_hashtags": self.distinct_hashtags,
            "time_span": list(self.time_span) if self.time_span else None,
        }


def _parse_timestamp(value) -> int:
    if isinstance(value, bool):
        raise MalformedRecord("created_at must be a timestamp")
    if isinstance(value, (int, float)):
        ts = int(value)
    elif isinstance(value, str):
        try:
            ts = int(value)
        except ValueError:
            try:
                dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
            except ValueError:
                raise MalformedRecord(f"unparseable timestamp {value!r}") from None
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            ts = int(dt.timestamp())
    else:
        raise MalformedRecord("created_at must be a timestamp")
    if ts < 0:
        raise MalformedRecord("created_at must be >= 0")
    return ts


def normalize_hashtags(raw) -> list[str]:
    tags = []
    for tag in raw:
        tag = str(tag).lstrip("#").lower()
        if tag:
            tags.append(tag)
    return dedupe_keep_order(tags)


def parse_tweet_record(line: str) -> TweetRecord:
    """Parse one JSONL record into a normalized TweetRecord."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedRecord("record is not an object")
    for required in ("id", "author_id", "created_at", "text"):
        if required not in data or data[required] is None:
            raise MalformedRecord(f"missing required field {required!r}")
    text = str(data["text"])
    if "hashtags" in data and data["hashtags"] is not None:
        hashtags = normalize_hashtags(data["hashtags"])
    else:
        hashtags = dedupe_keep_order(extract_hashtags(text))
    return TweetRecord(
        tweet_id=str(data["id"]),
        author_id=str(data["author_id"]),
        created_at=_parse_timestamp(data["created_at"]),
        text=text,
        hashtags=hashtags,
        mentions=[str(m) for m in data.get("mentions") or []],
        reply_to=str(data["reply_to"]) if data.get("reply_to") else None,
        retweet_of=str(data["retweet_of"]) if data.get("retweet_of") else None,
    )


def keyword_filter(record: TweetRecord, keywords) -> bool:
    """True iff a keyword occurs as a text token or equals a hashtag."""
    tokens = set(tokenize(record.text))
    tags = set(record.hashtags)
    return any(kw in tokens or kw in tags for kw in keywords)


def load_corpus(path, keywords=None, store=None) -> CorpusStats:
    """Load a JSONL corpus into the store's base tables.

    The whole file is parsed and filtered before anything is inserted, so a
    failure mid-file leaves the store untouched.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFound(f"corpus file not found: {path}")
    stats = CorpusStats()
    kept: list[TweetRecord] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            stats.records_read += 1
            try:
                record = parse_tweet_record(line)
            except MalformedRecord as exc:
                stats.records_rejected += 1
                logger.warning("%s:%d rejected: %s", path.name, lineno, exc.message)
                continue
            if keywords and not keyword_filter(record, [k.lower() for k in keywords]):
                stats.records_rejected += 1
                continue
            kept.append(record)
    if not kept:
        raise EmptyCorpus(f"no records kept from {path}")
    seen_ids = set()
    for record in kept:
        if record.tweet_id in seen_ids:
            raise MalformedRecord(f"duplicate tweet_id {record.tweet_id!r} in corpus")
        seen_ids.add(record.tweet_id)
    stats.records_kept = len(kept)
    stats.distinct_authors = len({r.author_id for r in kept})
    stats.distinct_hashtags = len({t for r in kept for t in r.hashtags})
    stats.time_span = (min(r.created_at for r in kept), max(r.created_at for r in kept))
    if store is not None:
        store.insert_records(kept)
    return stats


# --- synthetic corpora --------------------------------------------------------


@dataclass
class TopicCluster:
    name: str
    tags: list[str]
    weight: float = 1.0


@dataclass
class BurstSpec:
    tag: str
    start: int
    end: int
    multiplier: float


@dataclass
class SyntheticConfig:
    authors: int
    tweets: int
    clusters: list[TopicCluster]
    time_span: tuple[int, int]
    bursts: list[BurstSpec] = field(default_factory=list)
    tags_per_tweet: tuple[int, int] = (1, 3)
    filler_words: int = 2
    mention_rate: float = 0.3
    reply_rate: float = 0.1
    retweet_rate: float = 0.1
    hub_author: str | None = None
    hub_mention_rate: float = 0.0

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticConfig":
        clusters = [TopicCluster(c["name"], list(c["tags"]), float(c.get("weight", 1.0)))
                    for c in data.get("clusters", [])]
        bursts = [BurstSpec(b["tag"], int(b["start"]), int(b["end"]), float(b["multiplier"]))
                  for b in data.get("bursts", [])]
        span = data.get("time_span", [0, 86400])
        return cls(
            authors=int(data.get("authors", 0)),
            tweets=int(data.get("tweets", 0)),
            clusters=clusters,
            time_span=(int(span[0]), int(span[1])),
            bursts=bursts,
            tags_per_tweet=tuple(data.get("tags_per_tweet", (1, 3))),
            filler_words=int(data.get("filler_words", 2)),
            mention_rate=float(data.get("mention_rate", 0.3)),
            reply_rate=float(data.get("reply_rate", 0.1)),
            retweet_rate=float(data.get("retweet_rate", 0.1)),
            hub_author=data.get("hub_author"),
            hub_mention_rate=float(data.get("hub_mention_rate", 0.0)),
        )

    @classmethod
    def from_json_file(cls, path) -> "SyntheticConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFound(f"config file not found: {path}")
        return cls.from_dict(json.loads(path.read_text("utf-8")))


def _cluster_tag_weights(cluster: TopicCluster) -> list[float]:
    # Zipf-ish ranking inside a cluster keeps a few tags clearly dominant.
    return [1.0 / (rank + 1) for rank in range(len(cluster.tags))]


def generate_synthetic_corpus(config: SyntheticConfig, seed: int) -> list[TweetRecord]:
    """Deterministic two-level generator: author -> topic cluster -> tags.

    Burst injections add extra tweets of the named tag inside the interval so
    its per-bucket count reaches roughly `multiplier` times its base rate.
    """
    if config.authors <= 0 or config.tweets <= 0:
        raise InvalidConfig("authors and tweets must both be positive")
    if not config.clusters:
        raise InvalidConfig("at least one topic cluster is required")
    t0, t1 = config.time_span
    if t0 >= t1:
        raise InvalidConfig("time_span must be a non-empty interval")

    rng = random.Random(seed)
    author_ids = [f"u{i:04d}" for i in range(config.authors)]
    cluster_weights = [c.weight for c in config.clusters]
    author_cluster = {
        aid: rng.choices(range(len(config.clusters)), weights=cluster_weights)[0]
        for aid in author_ids
    }
    if config.hub_author and config.hub_author not in author_cluster:
        raise InvalidConfig(f"hub_author {config.hub_author!r} is not a generated author")

    records: list[TweetRecord] = []
    counter = 0

    def make_tweet(author: str, ts: int, tags: list[str],
                   mention_pool: list[str] | None = None) -> TweetRecord:
        nonlocal counter
        cluster = config.clusters[author_cluster[author]]
        fillers = [f"{cluster.name}{rng.randrange(config.filler_words)}"
                   for _ in range(config.filler_words)] if config.filler_words else []
        text = " ".join([f"#{t}" for t in tags] + fillers)
        mentions: list[str] = []
        if config.hub_author and author != config.hub_author and \
                rng.random() < config.hub_mention_rate:
            mentions.append(config.hub_author)
        if rng.random() < config.mention_rate and len(author_ids) > 1:
            other = rng.choice(author_ids)
            if other != author:
                mentions.append(other)
        if config.hub_author and author == config.hub_author and len(author_ids) > 1:
            target = rng.choice(author_ids)
            if target != author:
                mentions.append(target)
        reply_to = retweet_of = None
        if records and rng.random() < config.reply_rate:
            reply_to = rng.choice(records).tweet_id
        elif records and rng.random() < config.retweet_rate:
            retweet_of = rng.choice(records).tweet_id
        counter += 1
        return TweetRecord(
            tweet_id=f"t{counter:07d}", author_id=author, created_at=ts,
            text=text, hashtags=dedupe_keep_order(tags),
            mentions=dedupe_keep_order(mentions),
            reply_to=reply_to, retweet_of=retweet_of,
        )

    hub_share = 0.1 if config.hub_author else 0.0
    for _ in range(config.tweets):
        if config.hub_author and rng.random() < hub_share:
            author = config.hub_author
        else:
            author = rng.choice(author_ids)
        cluster = config.clusters[author_cluster[author]]
        lo, hi = config.tags_per_tweet
        n_tags = rng.randint(lo, min(hi, len(cluster.tags)))
        weights = _cluster_tag_weights(cluster)
        tags: list[str] = []
        while len(tags) < n_tags:
            tag = rng.choices(cluster.tags, weights=weights)[0]
            if tag not in tags:
                tags.append(tag)
        ts = rng.randrange(t0, t1)
        records.append(make_tweet(author, ts, tags))

    span_len = t1 - t0
    for burst in config.bursts:
        if burst.end <= burst.start:
            raise InvalidConfig(f"burst interval for {burst.tag!r} is empty")
        base_in_interval = sum(
            1 for r in records
            if burst.tag in r.hashtags and burst.start <= r.created_at < burst.end
        )
        interval_share = (burst.end - burst.start) / span_len
        global_count = sum(1 for r in records if burst.tag in r.hashtags)
        expected = max(base_in_interval, global_count * interval_share, 1.0)
        extra = math.ceil((burst.multiplier - 1.0) * expected)
        for _ in range(extra):
            author = rng.choice(author_ids)
            cluster = config.clusters[author_cluster[author]]
            co_tag = rng.choices(cluster.tags, weights=_cluster_tag_weights(cluster))[0]
            tags = [burst.tag] + ([co_tag] if co_tag != burst.tag else [])
            ts = rng.randrange(burst.start, burst.end)
            records.append(make_tweet(author, ts, tags))

    return records


def records_to_jsonl(records) -> str:
    lines = []
    for r in records:
        lines.append(json.dumps({
            "id": r.tweet_id, "author_id": r.author_id, "created_at": r.created_at,
            "text": r.text, "hashtags": r.hashtags, "mentions": r.mentions,
            "reply_to": r.reply_to, "retweet_of": r.retweet_of,
        }, sort_keys=True))
    return "\n".join(lines) + "\n"
