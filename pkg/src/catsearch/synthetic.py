"""Generated corpora for demos and tests.

Two generators write a category tree plus matching queries and qrels files:

``write_table_corpus``
    plants the nine regulation queries so that retrieved/relevant counts
    before and after category filtering come out at fixed values
    (``TABLE_ROWS``).  Ten categories of 25 documents each, since one row
    needs 125 documents retrieved.

``write_synthetic_corpus``
    a randomised corpus with the ten Yarmouk category sizes (124
    documents).  Each query's relevant documents sit in one category and
    every relevant document contains all query terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import builtin_stopwords
from .evaluate import QuerySpec

ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي"

#: (slug, document count) for the ten categories of the regulations corpus
YARMOUK_CATEGORIES = [
    ("01_higher_education", 6),
    ("02_yarmouk_university", 19),
    ("03_teaching_staff", 14),
    ("04_personnel", 17),
    ("05_students", 12),
    ("06_financial_affairs_supplies", 18),
    ("07_student_financial_affairs", 3),
    ("08_degrees_certifications", 9),
    ("09_scientific_research", 11),
    ("10_centres_institutes_schools", 15),
]

#: query text, retrieved before, retrieved after, relevant (= hits)
TABLE_ROWS = [
    ("بعثات", 3, 1, 1),
    ("التأمين الصحي", 12, 4, 2),
    ("الرحلات الجامعية", 23, 4, 1),
    ("معادلة الشهادات", 4, 1, 1),
    ("تثبيت أعضاء الهيئة التدريسية", 62, 23, 1),
    ("معاملة ترقية", 17, 6, 1),
    ("ميزانية الجامعة", 109, 10, 1),
    ("التعيينات", 1, 1, 1),
    ("تشكيل المجالس في الجامعة", 125, 14, 1),
]


@dataclass
class GeneratedCorpus:
    root: Path
    queries: list[QuerySpec]
    qrels: dict[str, list[str]]
    categories: dict[str, int] = field(default_factory=dict)

    def write_queries(self, path) -> Path:
        path = Path(path)
        lines = [f"{q.query_id}\t{q.text}\t{q.category or ''}" for q in self.queries]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def write_qrels(self, path) -> Path:
        path = Path(path)
        lines = [f"{qid}\t{d}" for qid, docs in self.qrels.items() for d in docs]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def _words(rng: random.Random, n: int, exclude: set[str]) -> list[str]:
    out: list[str] = []
    seen = set(exclude) | builtin_stopwords()
    while len(out) < n:
        w = "".join(rng.choice(ARABIC_LETTERS) for _ in range(rng.randint(4, 7)))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _write(root: Path, layout: dict[str, list[list[str]]]) -> None:
    for category, docs in layout.items():
        d = root / category
        d.mkdir(parents=True, exist_ok=True)
        for i, words in enumerate(docs):
            (d / f"doc{i:03d}.txt").write_text(" ".join(words) + "\n", encoding="utf-8")


def _doc_id(category: str, i: int) -> str:
    return f"{category}/doc{i:03d}.txt"


def write_table_corpus(root, seed: int = 0, docs_per_category: int = 25) -> GeneratedCorpus:
    root = Path(root)
    rng = random.Random(seed)
    categories = [slug for slug, _ in YARMOUK_CATEGORIES]
    query_words = {w for text, *_ in TABLE_ROWS for w in text.split()}
    filler = _words(rng, 400, query_words)

    layout = {c: [rng.sample(filler, 12) for _ in range(docs_per_category)] for c in categories}
    queries, qrels = [], {}
    for row, (text, before, after, hits) in enumerate(TABLE_ROWS):
        target = categories[row]
        inside = [(target, i) for i in range(after)]
        pool = [(c, i) for c in categories if c != target for i in range(docs_per_category)]
        outside = sorted(rng.sample(pool, before - after))
        for c, i in inside + outside:
            layout[c][i].extend(text.split())
        qid = f"q{row + 1}"
        queries.append(QuerySpec(qid, text, target))
        qrels[qid] = [_doc_id(target, i) for i in range(hits)]

    for docs in layout.values():
        for words in docs:
            rng.shuffle(words)
    _write(root, layout)
    return GeneratedCorpus(root, queries, qrels, {c: docs_per_category for c in categories})


def write_synthetic_corpus(root, seed: int = 0, n_queries: int = 9,
                           sizes=YARMOUK_CATEGORIES) -> GeneratedCorpus:
    root = Path(root)
    rng = random.Random(seed)
    categories = [slug for slug, _ in sizes]
    counts = dict(sizes)

    general = _words(rng, 300, set())
    topical = {c: _words(rng, 40, set(general)) for c in categories}
    used = set(general).union(*topical.values())
    layout = {}
    for c in categories:
        layout[c] = [rng.sample(general, 20) + rng.choices(topical[c], k=10)
                     for _ in range(counts[c])]

    queries, qrels = [], {}
    for q in range(n_queries):
        terms = _words(rng, rng.randint(1, 4), used)
        used.update(terms)
        target = rng.choice([c for c in categories if counts[c] >= 2])
        in_cat = rng.sample(range(counts[target]), k=min(counts[target], rng.randint(2, 5)))
        relevant = in_cat[: rng.randint(1, min(2, len(in_cat)))]
        others = [(c, i) for c in categories if c != target for i in range(counts[c])]
        outside = rng.sample(others, k=rng.randint(1, 20))
        for i in in_cat:
            # relevant documents lean on the query terms harder
            reps = 3 if i in relevant else 1
            layout[target][i].extend(terms * reps)
        for c, i in outside:
            layout[c][i].extend(terms)
        # partial matches: some documents get only one of the terms
        if len(terms) > 1:
            for c, i in rng.sample(others, k=5):
                layout[c][i].append(rng.choice(terms))

        qid = f"s{q + 1}"
        queries.append(QuerySpec(qid, " ".join(terms), target))
        qrels[qid] = sorted(_doc_id(target, i) for i in relevant)

    for docs in layout.values():
        for words in docs:
            rng.shuffle(words)
    _write(root, layout)
    return GeneratedCorpus(root, queries, qrels, counts)
