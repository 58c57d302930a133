"""Tokenization shared by ingestion, the text index and topic modeling."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


def tokenize(text: str) -> list[str]:
    """Split into lowercased runs of alphanumeric characters.

    Splitting on every non-alphanumeric character avoids substring false
    positives ("shiver" never yields "hiv").
    """
    tokens = []
    current = []
    for ch in text:
        if ch.isalnum():
            current.append(ch)
        elif current:
            tokens.append("".join(current).lower())
            current = []
    if current:
        tokens.append("".join(current).lower())
    return tokens


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    data = resources.files("sleuth.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in data.split() if w)


def content_tokens(text: str) -> list[str]:
    """Tokens with stopwords removed; the unit indexed and topic-modeled."""
    stop = stopwords()
    return [t for t in tokenize(text) if t not in stop]


def extract_hashtags(text: str) -> list[str]:
    """Hashtags as '#' followed by an alphanumeric run, normalized lowercase."""
    tags = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] == "#":
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
            if j > i + 1:
                tags.append(text[i + 1:j].lower())
            i = j
        else:
            i += 1
    return tags


def dedupe_keep_order(items) -> list:
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out
