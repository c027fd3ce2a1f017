import os
from pathlib import Path

import pytest

from catsearch.corpus import CorpusError, decode_bytes, ingest
from catsearch.synthetic import YARMOUK_CATEGORIES


def test_ten_categories_124_documents(corpus_tree):
    files = {}
    for slug, n in YARMOUK_CATEGORIES:
        for i in range(n):
            files[f"{slug}/{i}.txt"] = "نص"
    corpus = ingest(corpus_tree(files))
    m = corpus.manifest
    assert len(m.categories) == 10
    assert [n for _, n in m.categories] == [6, 19, 14, 17, 12, 18, 3, 9, 11, 15]
    assert m.total_documents == 124 == len(corpus)


def test_single_empty_file(corpus_tree):
    corpus = ingest(corpus_tree({"A/empty.txt": ""}))
    assert len(corpus) == 1
    doc = corpus.documents[0]
    assert doc.text == "" and doc.category == "A" and doc.doc_id == "A/empty.txt"


def _naive_counts(root):
    counts = {}
    for cat in os.listdir(root):
        if cat.startswith(".") or not os.path.isdir(os.path.join(root, cat)):
            continue
        stack = [os.path.join(root, cat)]
        while stack:
            d = stack.pop()
            for name in os.listdir(d):
                if name.startswith("."):
                    continue
                p = os.path.join(d, name)
                if os.path.isdir(p):
                    stack.append(p)
                else:
                    counts[cat] = counts.get(cat, 0) + 1
    return counts


def test_nested_files_belong_to_top_category(corpus_tree):
    root = corpus_tree({
        "law/a.txt": "1",
        "law/sub/b.txt": "2",
        "law/sub/deeper/c.txt": "3",
        "money/x.txt": "4",
        "money/.hidden.txt": "skip",
        ".git/config": "skip",
    })
    corpus = ingest(root)
    assert [d.doc_id for d in corpus] == [
        "law/a.txt", "law/sub/b.txt", "law/sub/deeper/c.txt", "money/x.txt"]
    assert {d.doc_id: d.category for d in corpus}["law/sub/deeper/c.txt"] == "law"
    assert dict(corpus.manifest.categories) == _naive_counts(root) == {"law": 3, "money": 1}


def test_root_level_file_rejected(corpus_tree):
    corpus = ingest(corpus_tree({"stray.txt": "x", "A/a.txt": "y"}))
    assert [d.doc_id for d in corpus] == ["A/a.txt"]
    assert [i.path for i in corpus.issues] == ["stray.txt"]
    assert corpus.errors == []


def test_undecodable_file_skipped_and_reported(corpus_tree):
    root = corpus_tree({"A/good.txt": "ok", "A/bad.txt": b"\xff\xfe\xfa bad"})
    corpus = ingest(root)
    assert [d.doc_id for d in corpus] == ["A/good.txt"]
    assert len(corpus.errors) == 1 and corpus.errors[0].path == "A/bad.txt"


def test_legacy_encoding_switch(corpus_tree):
    raw = "بعثات".encode("cp1256")
    root = corpus_tree({"A/legacy.txt": raw, "A/plain.txt": "x"})
    assert len(ingest(root).errors) == 1
    corpus = ingest(root, legacy_encoding=True)
    assert corpus.documents[0].text == "بعثات"
    assert corpus.errors == []


def test_bom_removed():
    assert decode_bytes("\ufeffabc".encode("utf-8")) == "abc"


def test_unreadable_file(corpus_tree, monkeypatch):
    root = corpus_tree({"A/a.txt": "x", "A/b.txt": "y"})
    real = Path.read_bytes

    def read_bytes(self):
        if self.name == "b.txt":
            raise PermissionError(13, "Permission denied")
        return real(self)
    monkeypatch.setattr(Path, "read_bytes", read_bytes)
    corpus = ingest(root)
    assert [d.doc_id for d in corpus] == ["A/a.txt"]
    assert corpus.errors[0].path == "A/b.txt"
    assert "unreadable" in corpus.errors[0].reason


def test_empty_root_is_fatal(tmp_path):
    with pytest.raises(CorpusError):
        ingest(tmp_path)
    (tmp_path / "A").mkdir()
    with pytest.raises(CorpusError):
        ingest(tmp_path)


def test_missing_root_is_fatal(tmp_path):
    with pytest.raises(CorpusError, match="nope"):
        ingest(tmp_path / "nope")


def test_deterministic_and_parallel_order(corpus_tree):
    files = {f"c{i % 3}/f{i:02d}.txt": f"word{i}" for i in range(30)}
    root = corpus_tree(files)
    a, b = ingest(root), ingest(root, workers=4)
    assert a.manifest == b.manifest
    assert a.documents == b.documents
    assert [d.doc_id for d in a] == sorted(files)
