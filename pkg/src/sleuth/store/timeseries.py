"""Bucketed time series (hour/day/week granularity, UTC-aligned)."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidInterval

GRANULARITY_SECONDS = {"hour": 3600, "day": 86400, "week": 604800}

# 1970-01-05 was a Monday; weeks are Monday-aligned.
_WEEK_ANCHOR = 4 * 86400


def bucket_start(ts: int, granularity: str) -> int:
    if granularity == "hour":
        return ts - ts % 3600
    if granularity == "day":
        return ts - ts % 86400
    if granularity == "week":
        return ts - (ts - _WEEK_ANCHOR) % 604800
    raise InvalidInterval(f"unknown granularity {granularity!r}")


@dataclass
class TimeSeries:
    name: str
    granularity: str = "hour"
    points: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        if self.granularity not in GRANULARITY_SECONDS:
            raise InvalidInterval(f"unknown granularity {self.granularity!r}")
        prev = None
        for ts, value in self.points:
            if ts != bucket_start(ts, self.granularity):
                raise InvalidInterval(f"point {ts} not aligned to {self.granularity}")
            if prev is not None and ts <= prev:
                raise InvalidInterval("bucket timestamps must be strictly increasing")
            if value < 0:
                raise InvalidInterval("time series values must be non-negative")
            prev = ts

    @property
    def step(self) -> int:
        return GRANULARITY_SECONDS[self.granularity]

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def timestamps(self) -> list[int]:
        return [t for t, _ in self.points]

    def slice(self, start: int, end: int) -> "TimeSeries":
        """Points whose bucket start falls in [start, end)."""
        if start >= end:
            raise InvalidInterval("empty interval")
        pts = [(t, v) for t, v in self.points if start <= t < end]
        return TimeSeries(self.name, self.granularity, pts)

    def densify(self) -> "TimeSeries":
        """Fill missing buckets between the first and last point with zeros."""
        if not self.points:
            return TimeSeries(self.name, self.granularity, [])
        step = self.step
        existing = dict(self.points)
        first, last = self.points[0][0], self.points[-1][0]
        pts = [(t, existing.get(t, 0.0)) for t in range(first, last + step, step)]
        return TimeSeries(self.name, self.granularity, pts)

    def __len__(self) -> int:
        return len(self.points)


def bucket_counts(timestamps, granularity: str = "hour", name: str = "counts") -> TimeSeries:
    """Aggregate raw timestamps into a counted series, empty buckets omitted."""
    counts: dict[int, int] = {}
    for ts in timestamps:
        b = bucket_start(int(ts), granularity)
        counts[b] = counts.get(b, 0) + 1
    pts = [(t, float(counts[t])) for t in sorted(counts)]
    return TimeSeries(name, granularity, pts)
