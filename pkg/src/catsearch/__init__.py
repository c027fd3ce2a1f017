"""Category-aware keyword search: inverted index, category-filtered
retrieval, Naive Bayes / KNN category prediction and a precision/recall
harness comparing retrieval with and without category filtering."""

__version__ = "0.1.0"

from .analysis import AnalyzerConfig, analyze, load_stopwords
from .corpus import Document, ingest
from .index import InvertedIndex, build, load, persist, prune_by_df
from .search import Query, SearchResult, compare_modes, make_query, search

__all__ = [
    "AnalyzerConfig", "analyze", "load_stopwords",
    "Document", "ingest",
    "InvertedIndex", "build", "load", "persist", "prune_by_df",
    "Query", "SearchResult", "compare_modes", "make_query", "search",
]
