"""Command-line interface: ``catsearch {index,info,search,classify,eval,generate}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, binfmt, classify, evaluate
from .analysis import STEMMERS, AnalyzerConfig, ConfigError, resolve_stopwords
from .corpus import CorpusError, ingest
from .index import IndexBuildError, build, load, persist, prune_by_df
from .search import MODES, SCORERS, SearchError, make_query, search

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("catsearch")


class UsageError(Exception):
    pass


def _add_analyzer_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("analyzer")
    g.add_argument("--stopwords", metavar="SPEC",
                   help="stop-word file, 'arabic' for the bundled list, or 'none' "
                        "(index default: $CATSEARCH_STOPWORDS)")
    g.add_argument("--strip-symbols", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None,
                   help="Unicode normalization and case folding")
    g.add_argument("--strip-diacritics", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--stemmer", choices=sorted(STEMMERS) + ["none"])


def _add_classifier_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("classifier")
    g.add_argument("--classifier", choices=classify.CLASSIFIERS, default="nb")
    g.add_argument("--k", type=int, default=5, help="neighbours for knn")
    g.add_argument("--alpha", type=float, default=1.0, help="Naive Bayes smoothing")
    g.add_argument("--model", type=Path, help="load a saved model instead of training")


def _analyzer_overrides(args) -> dict:
    out = {}
    if args.stopwords is not None:
        out["stopwords"] = resolve_stopwords(args.stopwords)
    if args.strip_symbols is not None:
        out["strip_symbols"] = args.strip_symbols
    if args.normalize is not None:
        out["normalize_unicode"] = args.normalize
    if args.strip_diacritics is not None:
        out["strip_diacritics"] = args.strip_diacritics
    if args.stemmer is not None:
        out["stemmer"] = None if args.stemmer == "none" else args.stemmer
    return out


def _load_index(args):
    if not args.index.is_file():
        raise UsageError(f"index file not found: {args.index}")
    index = load(args.index)
    overrides = _analyzer_overrides(args)
    if overrides:
        requested = replace(index.config, **overrides)
        if requested.fingerprint() != index.config.fingerprint():
            raise UsageError("requested analyzer settings differ from those the index was "
                             "built with; rebuild the index or drop the analyzer flags")
    return index


def _model(args, index):
    if args.model is not None:
        if not args.model.is_file():
            raise UsageError(f"model file not found: {args.model}")
        return classify.load_model(args.model)
    return classify.train(index, args.classifier, alpha=args.alpha, k=args.k)


def _print_manifest(index, out):
    print(f"documents: {index.N}", file=out)
    print(f"vocabulary: {len(index.postings)}", file=out)
    if index.min_df > 1:
        print(f"pruned at df >= {index.min_df}", file=out)
    counts = index.category_counts()
    print(f"categories: {len(counts)}", file=out)
    width = max(len(c) for c in counts)
    for c, n in counts.items():
        print(f"  {c.ljust(width)}  {n}", file=out)


# -- commands ---------------------------------------------------------------

def cmd_index(args) -> int:
    if not args.root.is_dir():
        raise UsageError(f"corpus root not found: {args.root}")
    if args.min_df < 1:
        raise UsageError("--min-df must be >= 1")
    config = replace(AnalyzerConfig(stopwords=resolve_stopwords(args.stopwords)),
                     **{k: v for k, v in _analyzer_overrides(args).items() if k != "stopwords"})
    corpus = ingest(args.root, legacy_encoding=args.legacy_encoding, workers=args.workers)
    index = build(corpus.documents, config, workers=args.workers)
    if args.min_df > 1:
        index = prune_by_df(index, args.min_df)
    persist(index, args.output)
    _print_manifest(index, sys.stdout)
    print(f"written: {args.output}")
    for issue in corpus.issues:
        print(f"warning: skipped {issue}", file=sys.stderr)
    return EXIT_FAILURE if corpus.errors else EXIT_OK


def cmd_info(args) -> int:
    index = _load_index(args)
    _print_manifest(index, sys.stdout)
    print(f"analyzer: {index.config.to_json() if args.verbose else index.config.fingerprint().hex()[:16]}")
    return EXIT_OK


def _fmt_score(score, scorer) -> str:
    return f"{score:.6f}" if scorer == "tfidf" else str(score)


def cmd_search(args) -> int:
    index = _load_index(args)
    if args.top is not None and args.top < 1:
        raise UsageError("--top must be >= 1")
    category = args.category
    if args.predict_category:
        pred = classify.predict_query_category(index, args.query, _model(args, index))
        category = pred.category
        print(f"predicted category: {category} (score {pred.score:.4f})")
    query = make_query(index, args.query, category, args.scorer, args.mode)
    result = search(index, query)
    shown = result.hits if args.top is None else result.hits[: args.top]
    for rank, h in enumerate(shown, 1):
        print(f"{rank:>4}  {_fmt_score(h.score, args.scorer):>10}  {h.category}  {h.path}")
    print(f"{result.retrieved_count} total")
    return EXIT_OK


def cmd_classify(args) -> int:
    index = _load_index(args)
    model = _model(args, index)
    if args.save_model is not None:
        classify.save_model(model, args.save_model)
        print(f"model written: {args.save_model}")
    if args.query is None:
        return EXIT_OK
    pred = classify.predict_query_category(index, args.query, model)
    print(f"category: {pred.category}")
    for r in pred.ranking:
        extra = f"  mean similarity {r.similarity:.4f}" if r.similarity is not None else ""
        print(f"  {r.category}  {r.score:.6f}{extra}")
    return EXIT_OK


def cmd_eval(args) -> int:
    index = _load_index(args)
    for p in (args.queries, args.qrels):
        if not p.is_file():
            raise UsageError(f"file not found: {p}")
    queries = evaluate.read_queries(args.queries)
    qrels = evaluate.read_qrels(args.qrels, index)
    if not queries:
        print("warning: queries file is empty", file=sys.stderr)
    model = _model(args, index) if args.routing == "predicted" else None
    report = evaluate.run_comparison(
        index, queries, qrels, routing=args.routing, scorer=args.scorer, mode=args.mode,
        classifier=args.classifier, model=model, empty_precision=args.empty_precision)

    table = evaluate.to_table(report)
    sys.stdout.write(table)
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "report.tsv").write_text(evaluate.to_tsv(report), encoding="utf-8")
        (args.out_dir / "report.txt").write_text(table, encoding="utf-8")
        if args.figure and any(r.error is None for r in report.rows):
            from .plotting import save_comparison_figure
            save_comparison_figure(report, args.out_dir / "report.png")
    if report.errors:
        print(f"warning: {len(report.errors)} of {len(report.rows)} queries could not be "
              f"evaluated", file=sys.stderr)
    return EXIT_OK


def cmd_generate(args) -> int:
    from . import synthetic
    out = args.out
    if (out / "corpus").exists():
        raise UsageError(f"{out / 'corpus'} already exists")
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "table":
        gen = synthetic.write_table_corpus(out / "corpus", seed=args.seed)
    else:
        gen = synthetic.write_synthetic_corpus(out / "corpus", seed=args.seed)
    gen.write_queries(out / "queries.tsv")
    gen.write_qrels(out / "qrels.tsv")
    print(f"corpus:  {out / 'corpus'} ({sum(gen.categories.values())} documents)")
    print(f"queries: {out / 'queries.tsv'}")
    print(f"qrels:   {out / 'qrels.tsv'}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catsearch", description="Category-aware keyword search over a document tree.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index from <root>/<category>/**/<file>")
    p.add_argument("root", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--min-df", type=int, default=1, help="drop terms in fewer documents")
    p.add_argument("--legacy-encoding", action="store_true",
                   help="accept cp1256 files that are not valid UTF-8")
    p.add_argument("--workers", type=int, default=1)
    _add_analyzer_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("info", help="summarise an index")
    p.add_argument("index", type=Path)
    _add_analyzer_flags(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("search", help="run one query")
    p.add_argument("index", type=Path)
    p.add_argument("query")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--category", help="restrict results to one category")
    g.add_argument("--predict-category", action="store_true",
                   help="restrict results to the classifier's category for the query")
    p.add_argument("--scorer", choices=SCORERS, default="tf_sum")
    p.add_argument("--mode", choices=MODES, default="conjunctive")
    p.add_argument("--top", type=int, help="show only the first N hits")
    _add_analyzer_flags(p)
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("classify", help="predict a query's category, or save a model")
    p.add_argument("index", type=Path)
    p.add_argument("query", nargs="?")
    p.add_argument("--save-model", type=Path)
    _add_analyzer_flags(p)
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="precision/recall with and without category filtering")
    p.add_argument("index", type=Path)
    p.add_argument("queries", type=Path, help="TSV: query_id, text, optional category")
    p.add_argument("qrels", type=Path, help="TSV: query_id, relevant doc_id")
    p.add_argument("--routing", choices=evaluate.ROUTINGS, default="explicit")
    p.add_argument("--scorer", choices=SCORERS, default="tf_sum")
    p.add_argument("--mode", choices=MODES, default="conjunctive")
    p.add_argument("--empty-precision", type=int, choices=(0, 1), default=1,
                   help="precision when nothing is retrieved")
    p.add_argument("--out-dir", type=Path, help="write report.tsv, report.txt, report.png")
    p.add_argument("--figure", action=argparse.BooleanOptionalAction, default=True)
    _add_analyzer_flags(p)
    _add_classifier_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("generate", help="write a demo corpus with queries and qrels")
    p.add_argument("kind", choices=("table", "synthetic"))
    p.add_argument("out", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, SearchError, ConfigError) as e:
        print(f"catsearch: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, IndexBuildError, binfmt.FormatError, evaluate.EvaluationError,
            classify.ClassifierError, OSError) as e:
        print(f"catsearch: error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
