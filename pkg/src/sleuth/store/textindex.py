"""Full-text inverted index with a small boolean search grammar.

Grammar (case-insensitive, whitespace-separated clauses are AND-ed):

    QUERY  := CLAUSE+
    CLAUSE := ["-"] TERM | TERM "OR" TERM | '"' PHRASE '"' | "tag:" TERM

Ranking is by descending tf-idf sum over the positive text terms, ties
broken by ascending doc id.  tf is the raw in-document count and
idf = ln(1 + N/df).  Stopwords are dropped at indexing time and silently
dropped from queries, mirroring the indexed vocabulary.
"""

from __future__ import annotations

import math

from ..errors import QuerySyntaxError
from ..textutil import content_tokens, stopwords, tokenize


class InvertedIndex:
    def __init__(self):
        self.vocabulary: dict[str, int] = {}
        self.postings: dict[int, list[tuple[str, int]]] = {}
        self.doc_lengths: dict[str, int] = {}
        # Full token sequences (stopwords kept) back phrase verification;
        # per-doc tag sets back the tag: clause.
        self._doc_tokens: dict[str, list[str]] = {}
        self._doc_tags: dict[str, set[str]] = {}

    def add_document(self, doc_id: str, text: str, tags=()) -> None:
        if doc_id in self.doc_lengths:
            raise QuerySyntaxError(f"duplicate doc id {doc_id!r}")
        all_tokens = tokenize(text)
        terms = content_tokens(text)
        self.doc_lengths[doc_id] = len(terms)
        self._doc_tokens[doc_id] = all_tokens
        self._doc_tags[doc_id] = {t.lower() for t in tags}
        counts: dict[str, int] = {}
        for t in terms:
            counts[t] = counts.get(t, 0) + 1
        for term, tf in counts.items():
            term_id = self.vocabulary.setdefault(term, len(self.vocabulary))
            self.postings.setdefault(term_id, []).append((doc_id, tf))

    def finalize(self) -> None:
        for term_id in self.postings:
            self.postings[term_id].sort(key=lambda p: p[0])

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    def docs_with_term(self, term: str) -> dict[str, int]:
        term_id = self.vocabulary.get(term.lower())
        if term_id is None:
            return {}
        return dict(self.postings[term_id])

    def idf(self, term: str) -> float:
        term_id = self.vocabulary.get(term.lower())
        if term_id is None:
            return 0.0
        df = len(self.postings[term_id])
        return math.log(1.0 + self.doc_count / df)

    def tf_idf(self, term: str, doc_id: str) -> float:
        hits = self.docs_with_term(term)
        if doc_id not in hits:
            return 0.0
        return hits[doc_id] * self.idf(term)

    def term_vector(self, doc_id: str) -> dict[str, float]:
        """tf-idf weights of every indexed term in one document."""
        vec: dict[str, float] = {}
        for token in set(self._doc_tokens.get(doc_id, ())):
            if token in self.vocabulary:
                w = self.tf_idf(token, doc_id)
                if w > 0:
                    vec[token] = w
        return vec

    def validate(self) -> None:
        for term_id, plist in self.postings.items():
            ids = [d for d, _ in plist]
            assert ids == sorted(ids), f"postings for term {term_id} not sorted"
            for d in ids:
                assert d in self.doc_lengths, f"doc {d} missing a length entry"


# --- query parsing -----------------------------------------------------------

def _parse_query(query: str) -> list[dict]:
    """Tokenize the query into clause dicts; raises QuerySyntaxError."""
    if not query.split():
        raise QuerySyntaxError("empty query")
    clauses: list[dict] = []
    i = 0
    text = query.strip()
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        if text[i] == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QuerySyntaxError("unterminated phrase", position=i)
            clauses.append({"kind": "phrase", "text": text[i + 1:j]})
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        word = text[i:j]
        i = j
        if word.upper() == "OR":
            if not clauses or clauses[-1]["kind"] != "term" or clauses[-1].get("negated"):
                raise QuerySyntaxError("OR must follow a plain term", position=i)
            # consume the right operand
            while i < n and text[i].isspace():
                i += 1
            k = i
            while k < n and not text[k].isspace():
                k += 1
            right = text[i:k]
            if not right or right.startswith(("-", '"')) or right.upper() == "OR":
                raise QuerySyntaxError("OR requires a plain right-hand term", position=i)
            left = clauses.pop()
            clauses.append({"kind": "or", "terms": [left["term"], right.lower()]})
            i = k
            continue
        if word.startswith("tag:"):
            tag = word[4:].lower()
            if not tag:
                raise QuerySyntaxError("tag: requires a term", position=i)
            clauses.append({"kind": "tag", "tag": tag})
            continue
        negated = word.startswith("-")
        term = word[1:] if negated else word
        if not term:
            raise QuerySyntaxError("dangling '-'", position=i)
        clauses.append({"kind": "term", "term": term.lower(), "negated": negated})
    if not clauses:
        raise QuerySyntaxError("empty query")
    return clauses


def text_search(index: InvertedIndex, query: str) -> list[tuple[str, float]]:
    """Evaluate the boolean query; AND across clauses, ranked by tf-idf sum."""
    clauses = _parse_query(query)
    stop = stopwords()

    candidates: set[str] | None = None
    excluded: set[str] = set()
    scoring_terms: list[str] = []

    def narrow(docs: set[str]):
        nonlocal candidates
        candidates = docs if candidates is None else (candidates & docs)

    for clause in clauses:
        if clause["kind"] == "term":
            term = clause["term"]
            if term in stop:
                continue
            docs = set(index.docs_with_term(term))
            if clause["negated"]:
                excluded |= docs
            else:
                scoring_terms.append(term)
                narrow(docs)
        elif clause["kind"] == "or":
            terms = [t for t in clause["terms"] if t not in stop]
            docs: set[str] = set()
            for t in terms:
                docs |= set(index.docs_with_term(t))
                scoring_terms.append(t)
            if terms:
                narrow(docs)
        elif clause["kind"] == "phrase":
            phrase_tokens = tokenize(clause["text"])
            if not phrase_tokens:
                continue
            core = [t for t in phrase_tokens if t not in stop]
            if core:
                docs = set(index.docs_with_term(core[0]))
                for t in core[1:]:
                    docs &= set(index.docs_with_term(t))
            else:
                docs = set(index.doc_lengths)
            docs = {d for d in docs if _contains_phrase(index._doc_tokens[d], phrase_tokens)}
            scoring_terms.extend(core)
            narrow(docs)
        elif clause["kind"] == "tag":
            docs = {d for d, tags in index._doc_tags.items() if clause["tag"] in tags}
            narrow(docs)

    if candidates is None:
        # Query consisted only of negations/stopwords; nothing positive to match.
        return []
    hits = candidates - excluded
    scored = []
    for doc_id in hits:
        score = sum(index.tf_idf(t, doc_id) for t in scoring_terms)
        scored.append((doc_id, score))
    scored.sort(key=lambda p: (-p[1], p[0]))
    return scored


def _contains_phrase(tokens: list[str], phrase: list[str]) -> bool:
    k = len(phrase)
    return any(tokens[i:i + k] == phrase for i in range(len(tokens) - k + 1))
