"""Corpus ingestion.

A corpus is a directory tree laid out as ``<root>/<category>/**/<file>``:
every immediate subdirectory of the root names a category and every
regular file below it (at any depth) is one document of that category.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

#: Legacy Arabic code page accepted when ``legacy_encoding`` is enabled.
LEGACY_ARABIC_ENCODING = "cp1256"


class CorpusError(Exception):
    """Fatal ingestion failure (missing or empty corpus root)."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    path: str
    category: str
    text: str


@dataclass(frozen=True)
class IngestIssue:
    """A file that was skipped during ingestion, and why."""

    path: str
    reason: str
    fatal_for_file: bool = True

    def __str__(self):
        return f"{self.path}: {self.reason}"


@dataclass(frozen=True)
class CorpusManifest:
    root: str
    categories: tuple[tuple[str, int], ...]

    @property
    def total_documents(self) -> int:
        return sum(n for _, n in self.categories)

    def category_names(self) -> list[str]:
        return [name for name, _ in self.categories]


@dataclass
class Corpus:
    manifest: CorpusManifest
    documents: list[Document]
    issues: list[IngestIssue] = field(default_factory=list)

    def __iter__(self):
        return iter(self.documents)

    def __len__(self):
        return len(self.documents)

    @property
    def errors(self) -> list[IngestIssue]:
        """Issues where a real file could not be read or decoded."""
        return [i for i in self.issues if i.fatal_for_file]


def _hidden(name: str) -> bool:
    return name.startswith(".")


def _walk_files(category_dir: Path) -> list[Path]:
    found = []
    for dirpath, dirnames, filenames in os.walk(category_dir):
        dirnames[:] = [d for d in dirnames if not _hidden(d)]
        for name in filenames:
            if _hidden(name):
                continue
            p = Path(dirpath) / name
            if p.is_file():
                found.append(p)
    return found


def decode_bytes(raw: bytes, legacy_encoding: bool = False) -> str:
    """Decode file contents as UTF-8, optionally falling back to cp1256.

    Raises UnicodeDecodeError when no permitted encoding applies.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        if not legacy_encoding:
            raise
        text = raw.decode(LEGACY_ARABIC_ENCODING)
    # a leading BOM is an encoding artifact, not content
    return text.removeprefix("\ufeff")


def _load(path: Path, legacy_encoding: bool) -> str | IngestIssue:
    try:
        raw = path.read_bytes()
    except OSError as e:
        return IngestIssue(str(path), f"unreadable: {e.strerror or e}")
    try:
        return decode_bytes(raw, legacy_encoding)
    except UnicodeDecodeError as e:
        return IngestIssue(str(path), f"undecodable at byte {e.start}: {e.reason}")


def ingest(root, legacy_encoding: bool = False, workers: int = 1) -> Corpus:
    """Walk ``root`` and load every categorised document.

    Traversal order is lexicographic by relative path, so two ingestions of
    the same tree give identical manifests and document lists. Files that
    cannot be read or decoded are recorded in ``Corpus.issues`` and skipped;
    files lying directly in the root have no category and are rejected the
    same way.  ``workers > 1`` reads files on a thread pool; the resulting
    order is unaffected.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root is not a directory: {root}")

    issues: list[IngestIssue] = []
    candidates: list[tuple[str, str, Path]] = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if _hidden(entry.name):
            continue
        if entry.is_dir():
            for f in _walk_files(entry):
                rel = f.relative_to(root).as_posix()
                candidates.append((rel, entry.name, f))
        elif entry.is_file():
            issues.append(IngestIssue(entry.name, "file at corpus root has no category",
                                      fatal_for_file=False))

    candidates.sort(key=lambda c: c[0])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            loaded = list(pool.map(lambda c: _load(c[2], legacy_encoding), candidates))
    else:
        loaded = [_load(c[2], legacy_encoding) for c in candidates]

    documents = []
    counts: dict[str, int] = {}
    for (rel, category, _), text in zip(candidates, loaded):
        if isinstance(text, IngestIssue):
            issues.append(IngestIssue(rel, text.reason))
            continue
        documents.append(Document(doc_id=rel, path=rel, category=category, text=text))
        counts[category] = counts.get(category, 0) + 1

    for issue in issues:
        log.warning("skipped %s", issue)

    if not documents:
        raise CorpusError(f"no documents found under {root}")

    manifest = CorpusManifest(root=str(root), categories=tuple(sorted(counts.items())))
    return Corpus(manifest, documents, issues)
