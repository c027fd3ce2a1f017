"""Inverted index with per-document category metadata.

The index maps each term to a posting list of ``(doc_id, tf)`` pairs
sorted by ``doc_id``.  A separate document table holds every document's
path, category and analyzed token count, so the category lives once per
document rather than once per posting.
"""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from . import binfmt
from .analysis import AnalyzerConfig, analyze
from .corpus import Document

MAGIC = b"CATSIDX\x00"
VERSION = 1


class IndexBuildError(Exception):
    """Index could not be built."""


class DuplicateDocumentError(IndexBuildError):
    pass


class Posting(NamedTuple):
    doc_id: str
    tf: int


class DocInfo(NamedTuple):
    path: str
    category: str
    token_count: int


@dataclass
class InvertedIndex:
    postings: dict[str, list[Posting]]
    docs: dict[str, DocInfo]
    config: AnalyzerConfig = field(default_factory=AnalyzerConfig)
    #: df threshold this index was pruned at (1 = unpruned)
    min_df: int = 1
    #: terms dropped by df pruning; queries treat them like stopwords
    pruned: frozenset = frozenset()

    @property
    def N(self) -> int:
        return len(self.docs)

    @property
    def vocabulary(self) -> list[str]:
        return list(self.postings)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def category_counts(self) -> dict[str, int]:
        counts = Counter(info.category for info in self.docs.values())
        return dict(sorted(counts.items()))

    @property
    def categories(self) -> list[str]:
        return list(self.category_counts())

    def term_frequencies(self, doc_id: str) -> dict[str, int]:
        """Forward view of one document; O(vocabulary), meant for small jobs."""
        return {t: p.tf for t, plist in self.postings.items() for p in plist
                if p.doc_id == doc_id}

    def document_vectors(self) -> dict[str, dict[str, int]]:
        """Every document's term counts, keyed by doc_id (empty docs included)."""
        vecs: dict[str, dict[str, int]] = {d: {} for d in self.docs}
        for term, plist in self.postings.items():
            for p in plist:
                vecs[p.doc_id][term] = p.tf
        return vecs

    def check(self):
        """Assert the structural invariants; raises AssertionError."""
        assert not self.pruned & self.postings.keys()
        for term, plist in self.postings.items():
            ids = [p.doc_id for p in plist]
            assert ids == sorted(ids) and len(set(ids)) == len(ids), term
            assert 1 <= len(plist) <= self.N, term
            for p in plist:
                assert p.tf >= 1 and p.doc_id in self.docs, (term, p)
        if self.min_df == 1:
            totals = Counter()
            for plist in self.postings.values():
                for p in plist:
                    totals[p.doc_id] += p.tf
            for doc_id, info in self.docs.items():
                assert totals[doc_id] == info.token_count, doc_id


def build(documents: Iterable[Document], config: AnalyzerConfig | None = None,
          workers: int = 1) -> InvertedIndex:
    """Analyze every document and assemble the inverted index."""
    config = config or AnalyzerConfig()
    documents = list(documents)
    if not documents:
        raise IndexBuildError("cannot build an index from zero documents")

    seen = set()
    for d in documents:
        if d.doc_id in seen:
            raise DuplicateDocumentError(f"duplicate doc_id {d.doc_id!r}")
        seen.add(d.doc_id)

    def count(doc):
        return Counter(analyze(doc.text, config))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(count, documents))
    else:
        counts = [count(d) for d in documents]

    order = sorted(range(len(documents)), key=lambda i: documents[i].doc_id)
    docs: dict[str, DocInfo] = {}
    raw: dict[str, list[Posting]] = {}
    for i in order:
        d, c = documents[i], counts[i]
        docs[d.doc_id] = DocInfo(d.path, d.category, sum(c.values()))
        for term, tf in c.items():
            raw.setdefault(term, []).append(Posting(d.doc_id, tf))
    postings = {t: raw[t] for t in sorted(raw)}
    return InvertedIndex(postings, docs, config)


def prune_by_df(index: InvertedIndex, threshold: int) -> InvertedIndex:
    """Keep only terms whose document frequency is at least ``threshold``.

    The document table is carried over untouched, so token counts keep
    their unpruned meaning and N is unchanged.
    """
    if threshold < 1:
        raise ValueError("df threshold must be >= 1")
    kept = {t: list(pl) for t, pl in index.postings.items() if len(pl) >= threshold}
    dropped = index.pruned | (index.postings.keys() - kept.keys())
    return InvertedIndex(kept, dict(index.docs), index.config,
                         max(index.min_df, threshold), frozenset(dropped))


# -- persistence ------------------------------------------------------------

def dumps(index: InvertedIndex) -> bytes:
    w = binfmt.Writer()
    w.raw(index.config.fingerprint())
    w.str(index.config.to_json())
    w.u32(index.min_df)
    w.u32(index.N)
    w.u32(len(index.postings))
    slot = {}
    for i, (doc_id, info) in enumerate(index.docs.items()):
        slot[doc_id] = i
        w.str(doc_id)
        w.str(info.path)
        w.str(info.category)
        w.u64(info.token_count)
    for term, plist in index.postings.items():
        w.str(term)
        w.u32(len(plist))
        for p in plist:
            w.u32(slot[p.doc_id])
            w.u32(p.tf)
    w.u32(len(index.pruned))
    for term in sorted(index.pruned):
        w.str(term)
    return binfmt.frame(MAGIC, VERSION, w.getvalue())


def loads(data: bytes) -> InvertedIndex:
    body = binfmt.unframe(data, MAGIC, VERSION)
    r = binfmt.Reader(body)
    fingerprint = r.raw(32)
    config = _config(r.str())
    if config.fingerprint() != fingerprint:
        raise binfmt.FormatError("analyzer fingerprint does not match stored settings")
    min_df = r.u32()
    n_docs = r.u32()
    n_terms = r.u32()
    docs: dict[str, DocInfo] = {}
    ids = []
    for _ in range(n_docs):
        doc_id = r.str()
        docs[doc_id] = DocInfo(r.str(), r.str(), r.u64())
        ids.append(doc_id)
    postings: dict[str, list[Posting]] = {}
    for _ in range(n_terms):
        term = r.str()
        plist = []
        for _ in range(r.u32()):
            slot, tf = r.u32(), r.u32()
            if slot >= n_docs:
                raise binfmt.FormatError(f"posting for {term!r} points past the doc table")
            plist.append(Posting(ids[slot], tf))
        postings[term] = plist
    pruned = frozenset(r.str() for _ in range(r.u32()))
    if not r.at_end():
        raise binfmt.FormatError("trailing bytes after pruned-terms section")
    return InvertedIndex(postings, docs, config, min_df, pruned)


def _config(s: str) -> AnalyzerConfig:
    try:
        return AnalyzerConfig.from_dict(json.loads(s))
    except (ValueError, KeyError, TypeError) as e:
        raise binfmt.FormatError(f"bad analyzer settings block: {e}") from e


def persist(index: InvertedIndex, path) -> None:
    Path(path).write_bytes(dumps(index))


def load(path) -> InvertedIndex:
    return loads(Path(path).read_bytes())
