"""Burst detection on bucketed time series and bursty-hashtag ranking.

The burstiness statistic is a centered sliding-window z-score: how far a
bucket sits above its local neighborhood, in local standard deviations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import EmptyIntervalSet, InvalidArguments, SeriesTooShort
from ..store.tables import Table
from ..store.timeseries import TimeSeries, bucket_start

EPSILON = 1e-9


@dataclass(frozen=True)
class BurstInterval:
    start: int  # bucket timestamp, inclusive
    end: int    # bucket timestamp, exclusive
    peak: float

    def as_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "peak": self.peak}


def local_peakyness(series: TimeSeries, window: int) -> list[tuple[int, float]]:
    """Per-bucket z-score against a centered window of `window` buckets,
    truncated at the series boundaries."""
    if window < 3 or window % 2 == 0:
        raise InvalidArguments(f"window must be odd and >= 3, got {window}")
    values = series.values()
    n = len(values)
    if n < window:
        raise SeriesTooShort(f"series has {n} buckets, window needs {window}")
    half = window // 2
    out = []
    for t in range(n):
        lo = max(0, t - half)
        hi = min(n, t + half + 1)
        win = values[lo:hi]
        mean = sum(win) / len(win)
        var = sum((v - mean) ** 2 for v in win) / len(win)
        z = (values[t] - mean) / (math.sqrt(var) + EPSILON)
        out.append((series.points[t][0], z))
    return out


def detect_bursts(series: TimeSeries, window: int = 25, tau: float = 3.0,
                  min_len: int = 1) -> list[BurstInterval]:
    """Maximal runs of >= min_len consecutive buckets with z >= tau.

    Gaps in the series are zero-filled first so quiet buckets count as
    background rather than vanishing.
    """
    if tau <= 0:
        raise InvalidArguments(f"tau must be positive, got {tau}")
    if min_len < 1:
        raise InvalidArguments(f"min_len must be >= 1, got {min_len}")
    dense = series.densify()
    scores = local_peakyness(dense, window)
    step = dense.step
    intervals: list[BurstInterval] = []
    run: list[tuple[int, float]] = []
    for ts, z in scores:
        if z >= tau:
            run.append((ts, z))
            continue
        if len(run) >= min_len:
            intervals.append(BurstInterval(run[0][0], run[-1][0] + step,
                                           max(s for _, s in run)))
        run = []
    if len(run) >= min_len:
        intervals.append(BurstInterval(run[0][0], run[-1][0] + step,
                                       max(s for _, s in run)))
    return intervals


def bursty_hashtags(intervals: list[BurstInterval], k: int, store,
                    granularity: str = "hour") -> Table:
    """Rank hashtags by their rate inside the burst intervals relative to
    their corpus-wide rate."""
    if not intervals:
        raise EmptyIntervalSet("no burst intervals supplied")
    if k < 1:
        raise InvalidArguments(f"k must be >= 1, got {k}")
    use = store.tables["hashtag_use"]
    tags = use.values("tag")
    stamps = use.values("created_at")
    if not tags:
        return Table("bursty_hashtags",
                     [("hashtag", "categorical"), ("burst_ratio", "continuous")], [])

    step = {"hour": 3600, "day": 86400, "week": 604800}[granularity]
    covered_buckets: set[int] = set()
    for iv in intervals:
        b = bucket_start(iv.start, granularity)
        while b < iv.end:
            covered_buckets.add(b)
            b += step
    buckets_in = len(covered_buckets)

    span_lo = bucket_start(min(stamps), granularity)
    span_hi = bucket_start(max(stamps), granularity)
    buckets_total = (span_hi - span_lo) // step + 1

    def in_intervals(ts: int) -> bool:
        return any(iv.start <= ts < iv.end for iv in intervals)

    counts_in: dict[str, int] = {}
    counts_all: dict[str, int] = {}
    for tag, ts in zip(tags, stamps):
        counts_all[tag] = counts_all.get(tag, 0) + 1
        if in_intervals(ts):
            counts_in[tag] = counts_in.get(tag, 0) + 1

    rows = []
    for tag in counts_all:
        rate_in = counts_in.get(tag, 0) / buckets_in
        rate_global = counts_all[tag] / buckets_total
        rows.append((tag, rate_in / (rate_global + EPSILON)))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return Table("bursty_hashtags",
                 [("hashtag", "categorical"), ("burst_ratio", "continuous")], rows[:k])
