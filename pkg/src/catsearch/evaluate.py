"""Precision/recall evaluation and the before/after classification report.

Metrics are kept as exact fractions; decimals appear only when a report
is rendered.  Input files are tab separated:

* queries: ``query_id <TAB> query text [<TAB> category]``
* qrels:   ``query_id <TAB> doc_id`` (one relevant document per line)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from . import classify
from .index import InvertedIndex
from .search import SearchError, make_query, search

log = logging.getLogger(__name__)

ROUTINGS = ("explicit", "predicted")
REPORT_COLUMNS = ("query", "PRE_before", "RECALL_before", "PRE_after", "RECALL_after")


class EvaluationError(ValueError):
    pass


class InputFileError(EvaluationError):
    """A queries or qrels file is malformed; names the offending line."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = str(path)
        self.lineno = lineno


@dataclass(frozen=True)
class Ratio:
    """A metric value as an unreduced count pair, e.g. 2/12.

    The unreduced form is what gets printed; ``value`` is the exact number.
    """

    num: int
    den: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self):
        if self.num == self.den:
            return "1"
        if self.num == 0:
            return "0"
        return f"{self.num}/{self.den}"


def precision_recall(retrieved: Iterable[str], relevant: Iterable[str],
                     empty_precision: int = 1) -> tuple[Fraction, Fraction]:
    """Set-based precision and recall as exact fractions.

    An empty retrieved set has precision ``empty_precision`` (1 by default,
    the vacuous reading of 0/0).  An empty relevant set is an error.
    """
    p, r = precision_recall_ratios(retrieved, relevant, empty_precision)
    return p.value, r.value


def precision_recall_ratios(retrieved, relevant, empty_precision: int = 1
                            ) -> tuple[Ratio, Ratio]:
    retrieved, relevant = set(retrieved), set(relevant)
    if not relevant:
        raise EvaluationError("relevant set is empty; recall is undefined")
    if empty_precision not in (0, 1):
        raise ValueError("empty_precision must be 0 or 1")
    hit = len(retrieved & relevant)
    if retrieved:
        precision = Ratio(hit, len(retrieved))
    else:
        precision = Ratio(empty_precision, 1)
    return precision, Ratio(hit, len(relevant))


@dataclass(frozen=True)
class QueryEval:
    query_id: str
    retrieved: int
    relevant: int
    hit: int
    precision: Ratio
    recall: Ratio

    @property
    def vacuous(self) -> bool:
        return self.retrieved == 0


def evaluate_query(query_id: str, retrieved, relevant, empty_precision: int = 1) -> QueryEval:
    retrieved, relevant = set(retrieved), set(relevant)
    p, r = precision_recall_ratios(retrieved, relevant, empty_precision)
    return QueryEval(query_id, len(retrieved), len(relevant), len(retrieved & relevant), p, r)


# -- input files ------------------------------------------------------------

@dataclass(frozen=True)
class QuerySpec:
    query_id: str
    text: str
    category: str | None = None


def _tsv_lines(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise EvaluationError(f"cannot read {path}: {e}") from e
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def read_queries(path) -> list[QuerySpec]:
    queries, seen = [], set()
    for lineno, cols in _tsv_lines(path):
        if len(cols) not in (2, 3) or not cols[0].strip():
            raise InputFileError(path, lineno, "expected query_id<TAB>text[<TAB>category]")
        qid = cols[0].strip()
        if qid in seen:
            raise InputFileError(path, lineno, f"duplicate query id {qid!r}")
        seen.add(qid)
        category = cols[2].strip() if len(cols) == 3 and cols[2].strip() else None
        queries.append(QuerySpec(qid, cols[1], category))
    return queries


def read_qrels(path, index: InvertedIndex | None = None) -> dict[str, set[str]]:
    """Load judgments; with an index, every doc_id must exist in it."""
    qrels: dict[str, set[str]] = {}
    for lineno, cols in _tsv_lines(path):
        if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
            raise InputFileError(path, lineno, "expected query_id<TAB>doc_id")
        qid, doc_id = cols[0].strip(), cols[1].strip()
        if index is not None and doc_id not in index.docs:
            raise InputFileError(path, lineno, f"unknown document {doc_id!r}")
        qrels.setdefault(qid, set()).add(doc_id)
    return qrels


# -- before/after comparison -----------------------------------------------

@dataclass
class ComparisonRow:
    query_id: str
    text: str
    category: str | None
    before: QueryEval | None = None
    after: QueryEval | None = None
    error: str | None = None


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]
    routing: str
    scorer: str = "tf_sum"
    mode: str = "conjunctive"
    classifier: str | None = None
    empty_precision: int = 1

    def _mean(self, attr) -> Fraction | None:
        vals = [getattr(r, attr).precision.value for r in self.rows if r.error is None]
        return sum(vals, Fraction(0)) / len(vals) if vals else None

    @property
    def mean_precision_before(self) -> Fraction | None:
        return self._mean("before")

    @property
    def mean_precision_after(self) -> Fraction | None:
        return self._mean("after")

    @property
    def errors(self) -> list[ComparisonRow]:
        return [r for r in self.rows if r.error is not None]


def run_comparison(index: InvertedIndex, queries: list[QuerySpec], qrels: dict[str, set[str]],
                   routing: str = "explicit", scorer: str = "tf_sum",
                   mode: str = "conjunctive", classifier: str = "nb", model=None,
                   empty_precision: int = 1) -> ComparisonReport:
    """Evaluate every query unfiltered and category-filtered.

    Under ``explicit`` routing the category comes from the queries file;
    under ``predicted`` it comes from the classifier.  A row that cannot be
    evaluated carries an ``error`` and the run continues.
    """
    if routing not in ROUTINGS:
        raise EvaluationError(f"unknown routing {routing!r}")
    if routing == "predicted" and model is None:
        model = classify.train(index, classifier)

    rows = []
    for q in queries:
        row = ComparisonRow(q.query_id, q.text, None)
        rows.append(row)
        relevant = qrels.get(q.query_id)
        if not relevant:
            row.error = "no relevance judgments"
            continue
        try:
            if routing == "explicit":
                if q.category is None:
                    raise EvaluationError("no category given for explicit routing")
                row.category = q.category
            else:
                row.category = classify.predict_query_category(index, q.text, model).category
            query = make_query(index, q.text, None, scorer, mode)
            before = search(index, query)
            after = search(index, query.with_category(row.category))
        except (SearchError, EvaluationError, classify.ClassifierError) as e:
            row.error = str(e)
            log.warning("query %s: %s", q.query_id, e)
            continue
        row.before = evaluate_query(q.query_id, before.doc_ids(), relevant, empty_precision)
        row.after = evaluate_query(q.query_id, after.doc_ids(), relevant, empty_precision)

    return ComparisonReport(rows, routing, scorer, mode,
                            classifier if routing == "predicted" else None, empty_precision)


# -- rendering --------------------------------------------------------------

def _cells(row: ComparisonRow) -> list[str]:
    if row.error is not None:
        return [row.query_id, "NA", "NA", "NA", "NA"]
    return [row.query_id, str(row.before.precision), str(row.before.recall),
            str(row.after.precision), str(row.after.recall)]


def to_tsv(report: ComparisonReport) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    lines += ["\t".join(_cells(r)) for r in report.rows]
    return "\n".join(lines) + "\n"


def _dec(f: Fraction | None) -> str:
    return "-" if f is None else f"{float(f):.4f}"


def to_table(report: ComparisonReport) -> str:
    """Aligned plain-text rendering with decimals and the run settings."""
    header = ["query", "text", "category", "PRE_before", "RECALL_before",
              "PRE_after", "RECALL_after"]
    body = []
    for r in report.rows:
        if r.error is not None:
            body.append([r.query_id, r.text, r.category or "-", "NA", "NA", "NA", "NA"])
            continue
        cells = []
        for ev in (r.before, r.after):
            mark = "*" if ev.vacuous else ""
            cells.append(f"{ev.precision} ({float(ev.precision.value):.3f}){mark}")
            cells.append(f"{ev.recall} ({float(ev.recall.value):.3f})")
        body.append([r.query_id, r.text, r.category or "-"] + cells)
    widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]
    fmt = lambda row: "  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip()

    routing = report.routing
    if report.classifier:
        routing += f" ({report.classifier})"
    out = [f"routing: {routing}   scorer: {report.scorer}   mode: {report.mode}", "",
           fmt(header), fmt(["-" * w for w in widths])]
    out += [fmt(row) for row in body]
    out += ["", f"mean precision before: {_dec(report.mean_precision_before)}",
            f"mean precision after:  {_dec(report.mean_precision_after)}"]
    if any(r.error is None and (r.before.vacuous or r.after.vacuous) for r in report.rows):
        out.append(f"* nothing retrieved; precision taken as {report.empty_precision}")
    for r in report.errors:
        out.append(f"error in {r.query_id}: {r.error}")
    return "\n".join(out) + "\n"
