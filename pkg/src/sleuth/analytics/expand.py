"""Co-occurrence query expansion over the hashtag-use table."""

from __future__ import annotations

from ..errors import InvalidArguments
from ..store.tables import Table


def cooccurrence_expand(seeds, n: int, min_support: int, store) -> Table:
    """Top-n hashtags by the number of distinct tweets they share with any
    seed tag.  Seeds themselves are excluded; ties break lexicographically.
    """
    seeds = {s.lower() for s in seeds}
    if not seeds:
        raise InvalidArguments("seed set must be non-empty")
    if n < 1 or min_support < 1:
        raise InvalidArguments("n and min_support must be >= 1")
    use = store.tables["hashtag_use"]
    ti = use.col_index("tweet_id")
    gi = use.col_index("tag")
    seed_tweets = {row[ti] for row in use.rows if row[gi] in seeds}
    tweets_per_tag: dict[str, set[str]] = {}
    for row in use.rows:
        tag = row[gi]
        if tag in seeds or row[ti] not in seed_tweets:
            continue
        tweets_per_tag.setdefault(tag, set()).add(row[ti])
    counted = [(tag, len(tw)) for tag, tw in tweets_per_tag.items() if len(tw) >= min_support]
    counted.sort(key=lambda r: (-r[1], r[0]))
    return Table("cooccurrence_expansion",
                 [("hashtag", "categorical"), ("cooccurrence_count", "continuous")],
                 counted[:n])
