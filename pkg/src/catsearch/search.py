"""Keyword search over an inverted index.

Conjunctive mode (the default) returns only documents containing every
query term; disjunctive mode returns documents containing any of them.
Scores are either the sum of the query terms' frequencies in the document
(``tf_sum``) or the sum of ``tf * ln(N / df)`` (``tfidf``).  A query may be
restricted to a single category.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .analysis import analyze
from .index import InvertedIndex

SCORERS = ("tf_sum", "tfidf")
MODES = ("conjunctive", "disjunctive")


class SearchError(ValueError):
    pass


class EmptyQueryError(SearchError):
    pass


class UnknownCategoryError(SearchError):
    pass


@dataclass(frozen=True)
class Query:
    raw: str
    terms: tuple[str, ...]
    category: str | None = None
    scorer: str = "tf_sum"
    mode: str = "conjunctive"

    def __post_init__(self):
        if self.scorer not in SCORERS:
            raise SearchError(f"unknown scorer {self.scorer!r}")
        if self.mode not in MODES:
            raise SearchError(f"unknown mode {self.mode!r}")

    def with_category(self, category: str | None) -> "Query":
        return replace(self, category=category)


def make_query(index: InvertedIndex, raw: str, category: str | None = None,
               scorer: str = "tf_sum", mode: str = "conjunctive") -> Query:
    """Analyze ``raw`` with the index's own analyzer settings.

    Repeated terms are collapsed; a query is a set of keywords.  Terms the
    index dropped by df pruning are removed like stopwords.
    """
    terms = tuple(t for t in dict.fromkeys(analyze(raw, index.config))
                  if t not in index.pruned)
    return Query(raw, terms, category, scorer, mode)


class Hit(NamedTuple):
    doc_id: str
    path: str
    category: str
    score: float


@dataclass
class SearchResult:
    query: Query
    hits: list[Hit] = field(default_factory=list)

    @property
    def retrieved_count(self) -> int:
        return len(self.hits)

    def doc_ids(self) -> set[str]:
        return {h.doc_id for h in self.hits}


def idf(index: InvertedIndex, term: str) -> float:
    return math.log(index.N / index.df(term))


def search(index: InvertedIndex, query: Query) -> SearchResult:
    if not query.terms:
        raise EmptyQueryError(f"query {query.raw!r} has no searchable terms")
    if query.category is not None and query.category not in index.category_counts():
        raise UnknownCategoryError(f"unknown category {query.category!r}")

    lists = [index.postings.get(t) for t in query.terms]
    if query.mode == "conjunctive":
        if any(pl is None for pl in lists):
            return SearchResult(query)
        # intersect starting from the rarest term
        order = sorted(range(len(lists)), key=lambda i: len(lists[i]))
        candidates = {p.doc_id for p in lists[order[0]]}
        for i in order[1:]:
            candidates.intersection_update(p.doc_id for p in lists[i])
            if not candidates:
                return SearchResult(query)
    else:
        candidates = {p.doc_id for pl in lists if pl for p in pl}

    if query.category is not None:
        candidates = {d for d in candidates if index.docs[d].category == query.category}

    scores: dict[str, float] = dict.fromkeys(candidates, 0)
    for term, pl in zip(query.terms, lists):
        if not pl:
            continue
        weight = idf(index, term) if query.scorer == "tfidf" else 1
        for p in pl:
            if p.doc_id in scores:
                scores[p.doc_id] += p.tf * weight

    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    hits = [Hit(d, index.docs[d].path, index.docs[d].category, s) for d, s in ranked]
    return SearchResult(query, hits)


def compare_modes(index: InvertedIndex, before: Query, after: Query
                  ) -> tuple[SearchResult, SearchResult]:
    """Run a query without and with a category restriction.

    The two queries must be identical apart from ``category``.
    """
    if replace(after, category=before.category) != before:
        raise SearchError("queries must differ only in their category")
    unfiltered = search(index, before)
    filtered = search(index, after)
    assert filtered.doc_ids() <= unfiltered.doc_ids()
    return unfiltered, filtered
