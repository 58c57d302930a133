"""Generic distribution comparison for centrality scores and frequency data."""

from __future__ import annotations

from ..errors import InvalidArguments


def ks_statistic(xs, ys) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |F_x - F_y|."""
    xs = sorted(xs)
    ys = sorted(ys)
    if not xs or not ys:
        raise InvalidArguments("both samples must be non-empty")
    nx, ny = len(xs), len(ys)
    i = j = 0
    d = 0.0
    while i < nx and j < ny:
        if xs[i] <= ys[j]:
            i += 1
        else:
            j += 1
        d = max(d, abs(i / nx - j / ny))
    return d
