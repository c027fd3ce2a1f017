"""Category prediction from a labeled index.

Two classifiers are trained straight from the inverted index:

* multinomial Naive Bayes with additive smoothing, scored in log space;
* k-nearest-neighbours over tf-idf document vectors with cosine
  similarity (or, as a variant, nearest category centroid).

Either can route a query to a category for category-restricted search.
"""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

from . import binfmt
from .analysis import analyze
from .index import InvertedIndex

NB_MAGIC = b"CATSNBM\x00"
KNN_MAGIC = b"CATSKNN\x00"
MODEL_VERSION = 1

# scores this close are treated as tied, so tie-breaking is not at the
# mercy of floating-point summation order
TIE_TOLERANCE = 1e-12


class ClassifierError(ValueError):
    pass


class TrainingError(ClassifierError):
    pass


class NoSignalError(ClassifierError):
    """The query shares no weighted term with the training documents."""


class RankedCategory(NamedTuple):
    category: str
    score: float
    #: KNN only: mean cosine similarity of this category's voters
    similarity: float | None = None


@dataclass(frozen=True)
class Prediction:
    ranking: tuple[RankedCategory, ...]
    method: str

    @property
    def category(self) -> str:
        return self.ranking[0].category

    @property
    def score(self) -> float:
        return self.ranking[0].score


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=TIE_TOLERANCE, abs_tol=TIE_TOLERANCE)


def _desc(a: float, b: float) -> int:
    if _close(a, b):
        return 0
    return -1 if a > b else 1


def _rank_by_score(scores: dict[str, float]) -> tuple[RankedCategory, ...]:
    def cmp(x, y):
        return _desc(x[1], y[1]) or (-1 if x[0] < y[0] else 1)
    ordered = sorted(scores.items(), key=functools.cmp_to_key(cmp))
    return tuple(RankedCategory(c, s) for c, s in ordered)


# -- Naive Bayes ------------------------------------------------------------

@dataclass
class NaiveBayesModel:
    categories: list[str]
    priors: dict[str, float]
    cond: dict[str, dict[str, float]]
    vocab: list[str]
    alpha: float

    def __post_init__(self):
        self._log_prior = {c: math.log(p) for c, p in self.priors.items()}
        self._log_cond = {c: {t: math.log(p) for t, p in row.items()}
                          for c, row in self.cond.items()}

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def log_posteriors(self, terms: Sequence[str]) -> dict[str, float]:
        """Unnormalised log posterior per category; unknown terms skipped."""
        known = [t for t in terms if t in self._log_cond[self.categories[0]]]
        out = {}
        for c in self.categories:
            row = self._log_cond[c]
            out[c] = self._log_prior[c] + math.fsum(row[t] for t in known)
        return out


def train_nb(index: InvertedIndex, alpha: float = 1.0) -> NaiveBayesModel:
    if alpha <= 0:
        raise TrainingError("smoothing alpha must be positive")
    doc_counts = index.category_counts()
    if len(doc_counts) < 2:
        raise TrainingError("Naive Bayes needs at least two categories")
    vocab = index.vocabulary
    if not vocab:
        raise TrainingError("index vocabulary is empty")

    categories = list(doc_counts)
    counts = {c: Counter() for c in categories}
    for term, plist in index.postings.items():
        for p in plist:
            counts[index.docs[p.doc_id].category][term] += p.tf

    V = len(vocab)
    priors = {c: doc_counts[c] / index.N for c in categories}
    cond = {}
    for c in categories:
        denom = sum(counts[c].values()) + alpha * V
        cond[c] = {t: (counts[c][t] + alpha) / denom for t in vocab}
    return NaiveBayesModel(categories, priors, cond, vocab, alpha)


def predict_nb(model: NaiveBayesModel, terms: Sequence[str]) -> Prediction:
    """Rank categories by log prior plus summed log term likelihoods.

    An empty (or wholly out-of-vocabulary) term list ranks by prior alone.
    """
    return Prediction(_rank_by_score(model.log_posteriors(terms)), "nb")


# -- k nearest neighbours ---------------------------------------------------

KNN_VARIANTS = ("knn", "centroid")


@dataclass
class KnnModel:
    k: int
    doc_ids: list[str]
    labels: list[str]
    vectors: list[dict[str, float]]
    idf: dict[str, float]
    variant: str = "knn"

    def __post_init__(self):
        if self.variant not in KNN_VARIANTS:
            raise ClassifierError(f"unknown KNN variant {self.variant!r}")
        self.norms = [_norm(v) for v in self.vectors]
        self.categories = sorted(set(self.labels))
        if self.variant == "centroid":
            self._centroids = _centroids(self.labels, self.vectors, self.norms)

    def query_vector(self, terms: Sequence[str]) -> dict[str, float]:
        counts = Counter(t for t in terms if t in self.idf)
        vec = {t: tf * self.idf[t] for t, tf in counts.items()}
        return {t: w for t, w in vec.items() if w != 0}

    def similarities(self, terms: Sequence[str]) -> list[float]:
        q = self.query_vector(terms)
        qn = _norm(q)
        if qn == 0:
            raise NoSignalError("query has no terms with non-zero tf-idf weight")
        return [_cos(q, qn, v, n) for v, n in zip(self.vectors, self.norms)]


def _norm(v: dict[str, float]) -> float:
    return math.sqrt(math.fsum(w * w for w in v.values()))


def _cos(q, qn, v, vn) -> float:
    if vn == 0:
        return 0.0
    small, big = (q, v) if len(q) <= len(v) else (v, q)
    dot = math.fsum(w * big[t] for t, w in small.items() if t in big)
    return dot / (qn * vn)


def _centroids(labels, vectors, norms) -> dict[str, tuple[dict[str, float], float]]:
    sums: dict[str, Counter] = {}
    sizes = Counter(labels)
    for label, vec, n in zip(labels, vectors, norms):
        acc = sums.setdefault(label, Counter())
        if n:
            for t, w in vec.items():
                acc[t] += w / n
    out = {}
    for label, acc in sums.items():
        centroid = {t: w / sizes[label] for t, w in acc.items()}
        out[label] = (centroid, _norm(centroid))
    return out


def train_knn(index: InvertedIndex, k: int = 5, variant: str = "knn") -> KnnModel:
    if not 1 <= k <= index.N:
        raise TrainingError(f"k must lie in [1, {index.N}], got {k}")
    idf = {t: math.log(index.N / len(pl)) for t, pl in index.postings.items()}
    doc_vecs = index.document_vectors()
    doc_ids = list(index.docs)
    vectors = []
    for d in doc_ids:
        vectors.append({t: tf * idf[t] for t, tf in doc_vecs[d].items() if idf[t] != 0})
    labels = [index.docs[d].category for d in doc_ids]
    return KnnModel(k, doc_ids, labels, vectors, idf, variant)


def predict_knn(model: KnnModel, terms: Sequence[str]) -> Prediction:
    """Majority vote of the ``k`` most cosine-similar documents.

    Vote ties go to the higher mean similarity, then to the category name.
    Categories with no voters still appear in the ranking, with 0 votes.
    """
    if model.variant == "centroid":
        return _predict_centroid(model, terms)
    sims = model.similarities(terms)

    def by_sim(i, j):
        return _desc(sims[i], sims[j]) or (-1 if model.doc_ids[i] < model.doc_ids[j] else 1)
    nearest = sorted(range(len(sims)), key=functools.cmp_to_key(by_sim))[: model.k]

    votes = Counter(model.labels[i] for i in nearest)
    sim_sum: dict[str, list[float]] = {}
    for i in nearest:
        sim_sum.setdefault(model.labels[i], []).append(sims[i])
    rows = []
    for c in model.categories:
        mean = math.fsum(sim_sum[c]) / len(sim_sum[c]) if c in sim_sum else 0.0
        rows.append(RankedCategory(c, float(votes[c]), mean))

    def by_vote(a, b):
        if a.score != b.score:
            return -1 if a.score > b.score else 1
        return _desc(a.similarity, b.similarity) or (-1 if a.category < b.category else 1)
    return Prediction(tuple(sorted(rows, key=functools.cmp_to_key(by_vote))), "knn")


def _predict_centroid(model: KnnModel, terms: Sequence[str]) -> Prediction:
    q = model.query_vector(terms)
    qn = _norm(q)
    if qn == 0:
        raise NoSignalError("query has no terms with non-zero tf-idf weight")
    scores = {c: _cos(q, qn, vec, n) for c, (vec, n) in model._centroids.items()}
    ranking = _rank_by_score(scores)
    return Prediction(tuple(RankedCategory(r.category, r.score, r.score) for r in ranking),
                      "centroid")


# -- routing ----------------------------------------------------------------

CLASSIFIERS = ("nb", "knn", "centroid")


def train(index: InvertedIndex, classifier: str = "nb", alpha: float = 1.0, k: int = 5):
    if classifier == "nb":
        return train_nb(index, alpha)
    if classifier in ("knn", "centroid"):
        return train_knn(index, min(k, index.N), variant=classifier)
    raise ClassifierError(f"unknown classifier {classifier!r}")


def predict(model, terms: Sequence[str]) -> Prediction:
    if isinstance(model, NaiveBayesModel):
        return predict_nb(model, terms)
    return predict_knn(model, terms)


def predict_query_category(index: InvertedIndex, query, model=None,
                           classifier: str = "nb") -> Prediction:
    """Predict the category a query belongs to.

    ``query`` is raw text or a ``search.Query``; it is analyzed with the
    index's settings, keeping repeated terms.  Without a ``model`` one is
    trained on the fly.
    """
    raw = query if isinstance(query, str) else query.raw
    if model is None:
        model = train(index, classifier)
    return predict(model, analyze(raw, index.config))


# -- persistence ------------------------------------------------------------

def dumps_model(model) -> bytes:
    w = binfmt.Writer()
    if isinstance(model, NaiveBayesModel):
        w.f64(model.alpha)
        w.u32(len(model.categories))
        w.u32(len(model.vocab))
        for t in model.vocab:
            w.str(t)
        for c in model.categories:
            w.str(c)
            w.f64(model.priors[c])
            for t in model.vocab:
                w.f64(model.cond[c][t])
        return binfmt.frame(NB_MAGIC, MODEL_VERSION, w.getvalue())

    w.u32(model.k)
    w.str(model.variant)
    w.u32(len(model.idf))
    for t, v in model.idf.items():
        w.str(t)
        w.f64(v)
    w.u32(len(model.doc_ids))
    for d, label, vec in zip(model.doc_ids, model.labels, model.vectors):
        w.str(d)
        w.str(label)
        w.u32(len(vec))
        for t, v in vec.items():
            w.str(t)
            w.f64(v)
    return binfmt.frame(KNN_MAGIC, MODEL_VERSION, w.getvalue())


def loads_model(data: bytes):
    if data[:8] == NB_MAGIC:
        r = binfmt.Reader(binfmt.unframe(data, NB_MAGIC, MODEL_VERSION))
        alpha = r.f64()
        n_cat, n_vocab = r.u32(), r.u32()
        vocab = [r.str() for _ in range(n_vocab)]
        categories, priors, cond = [], {}, {}
        for _ in range(n_cat):
            c = r.str()
            categories.append(c)
            priors[c] = r.f64()
            cond[c] = {t: r.f64() for t in vocab}
        return NaiveBayesModel(categories, priors, cond, vocab, alpha)

    r = binfmt.Reader(binfmt.unframe(data, KNN_MAGIC, MODEL_VERSION))
    k = r.u32()
    variant = r.str()
    idf = {}
    for _ in range(r.u32()):
        t = r.str()
        idf[t] = r.f64()
    doc_ids, labels, vectors = [], [], []
    for _ in range(r.u32()):
        doc_ids.append(r.str())
        labels.append(r.str())
        vec = {}
        for _ in range(r.u32()):
            t = r.str()
            vec[t] = r.f64()
        vectors.append(vec)
    return KnnModel(k, doc_ids, labels, vectors, idf, variant)


def save_model(model, path) -> None:
    Path(path).write_bytes(dumps_model(model))


def load_model(path):
    return loads_model(Path(path).read_bytes())
