import pytest

from catsearch import synthetic
from catsearch.cli import main
from catsearch.index import load


@pytest.fixture
def table_run(tmp_path):
    gen = synthetic.write_table_corpus(tmp_path / "corpus")
    queries = gen.write_queries(tmp_path / "queries.tsv")
    qrels = gen.write_qrels(tmp_path / "qrels.tsv")
    idx = tmp_path / "table.idx"
    assert main(["index", str(gen.root), "-o", str(idx), "--stopwords", "none"]) == 0
    return idx, queries, qrels


@pytest.fixture
def tiny_index(tmp_path, corpus_tree):
    root = corpus_tree({
        "law/a.txt": "بعثات نظام",
        "law/b.txt": "نظام داخلي",
        "fin/c.txt": "بعثات مالية",
        "fin/d.txt": "رواتب مالية",
    })
    idx = tmp_path / "tiny.idx"
    assert main(["index", str(root), "-o", str(idx), "--stopwords", "none"]) == 0
    return idx


def test_index_summary_lists_categories(table_run, capsys):
    idx, _, _ = table_run
    assert main(["info", str(idx)]) == 0
    out = capsys.readouterr().out
    assert "documents: 250" in out and "categories: 10" in out
    for slug, _ in synthetic.YARMOUK_CATEGORIES:
        assert f"{slug}" in out


def test_index_missing_root(tmp_path, capsys):
    code = main(["index", str(tmp_path / "absent"), "-o", str(tmp_path / "x.idx")])
    assert code == 2
    assert "absent" in capsys.readouterr().err


def test_reindex_is_byte_identical(tmp_path, corpus_tree):
    root = corpus_tree({f"c{i % 3}/f{i}.txt": f"كلمة{i % 4} نص" for i in range(12)})
    a, b = tmp_path / "a.idx", tmp_path / "b.idx"
    assert main(["index", str(root), "-o", str(a)]) == 0
    assert main(["index", str(root), "-o", str(b), "--workers", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_index_reports_bad_files(tmp_path, corpus_tree, capsys):
    root = corpus_tree({"A/ok.txt": "x", "A/bad.txt": b"\xff\xfe bad"})
    assert main(["index", str(root), "-o", str(tmp_path / "i.idx")]) == 1
    assert "A/bad.txt" in capsys.readouterr().err
    assert load(tmp_path / "i.idx").N == 1


def test_index_flags_are_stored(tmp_path, corpus_tree):
    root = corpus_tree({"A/a.txt": "في الجامعة", "B/b.txt": "الجامعة"})
    out = tmp_path / "i.idx"
    assert main(["index", str(root), "-o", str(out), "--stopwords", "arabic",
                 "--stemmer", "light", "--min-df", "2"]) == 0
    idx = load(out)
    assert idx.config.stemmer == "light" and "في" in idx.config.stopwords
    assert idx.vocabulary == ["جامع"] and idx.min_df == 2


def test_stopwords_from_environment(tmp_path, corpus_tree, monkeypatch):
    sw = tmp_path / "sw.txt"
    sw.write_text("نظام\n", encoding="utf-8")
    monkeypatch.setenv("CATSEARCH_STOPWORDS", str(sw))
    root = corpus_tree({"A/a.txt": "نظام داخلي"})
    assert main(["index", str(root), "-o", str(tmp_path / "i.idx")]) == 0
    assert load(tmp_path / "i.idx").vocabulary == ["داخلي"]


def _rows(out):
    return [line for line in out.splitlines() if line.strip() and not line.endswith("total")
            and not line.startswith("predicted")]


def test_search_single_row(tiny_index, capsys):
    assert main(["search", str(tiny_index), "رواتب"]) == 0
    out = capsys.readouterr().out
    assert len(_rows(out)) == 1 and "fin/d.txt" in out and out.rstrip().endswith("1 total")


def test_search_with_category_is_subset(tiny_index, capsys):
    main(["search", str(tiny_index), "بعثات"])
    unfiltered = _rows(capsys.readouterr().out)
    main(["search", str(tiny_index), "بعثات", "--category", "law"])
    filtered = _rows(capsys.readouterr().out)
    paths = lambda rows: {r.split()[-1] for r in rows}
    assert len(unfiltered) == 2 and len(filtered) == 1
    assert paths(filtered) <= paths(unfiltered)


def test_search_top_truncates(tmp_path, corpus_tree, capsys):
    root = corpus_tree({f"A/d{i:02d}.txt": "تعيينات " * (i + 1) for i in range(12)})
    idx = tmp_path / "i.idx"
    main(["index", str(root), "-o", str(idx)])
    capsys.readouterr()
    assert main(["search", str(idx), "تعيينات", "--top", "5"]) == 0
    out = capsys.readouterr().out
    assert len(_rows(out)) == 5 and out.rstrip().endswith("12 total")
    assert _rows(out)[0].split()[1] == "12"


def test_search_predict_category(tiny_index, capsys):
    assert main(["search", str(tiny_index), "رواتب مالية", "--predict-category"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("predicted category: fin")


def test_search_usage_errors(tiny_index, capsys):
    assert main(["search", str(tiny_index), "بعثات", "--category", "nope"]) == 2
    assert main(["search", str(tiny_index), "?!"]) == 2
    assert main(["search", str(tiny_index) + ".missing", "x"]) == 2


def test_search_refuses_conflicting_analyzer(tiny_index, capsys):
    assert main(["search", str(tiny_index), "بعثات", "--stemmer", "light"]) == 2
    assert "analyzer" in capsys.readouterr().err
    # restating the settings the index was built with is fine
    assert main(["search", str(tiny_index), "بعثات", "--stopwords", "none",
                 "--strip-symbols"]) == 0


def test_corrupt_index_is_runtime_failure(tiny_index, capsys):
    data = bytearray(tiny_index.read_bytes())
    data[-10] ^= 0xFF
    tiny_index.write_bytes(bytes(data))
    assert main(["search", str(tiny_index), "بعثات"]) == 1
    assert "checksum" in capsys.readouterr().err


def test_classify_and_saved_model(tiny_index, tmp_path, capsys):
    model = tmp_path / "nb.model"
    assert main(["classify", str(tiny_index), "نظام", "--save-model", str(model)]) == 0
    out = capsys.readouterr().out
    assert "category: law" in out
    assert main(["search", str(tiny_index), "نظام", "--predict-category",
                 "--model", str(model)]) == 0
    assert main(["classify", str(tiny_index), "مالية", "--classifier", "knn", "--k", "1"]) == 0
    assert "category: fin" in capsys.readouterr().out


def test_eval_reproduces_table(table_run, tmp_path, capsys):
    idx, queries, qrels = table_run
    out_dir = tmp_path / "report"
    assert main(["eval", str(idx), str(queries), str(qrels), "--out-dir", str(out_dir)]) == 0
    tsv = (out_dir / "report.tsv").read_text(encoding="utf-8").splitlines()
    assert tsv[0] == "query\tPRE_before\tRECALL_before\tPRE_after\tRECALL_after"
    before = [line.split("\t")[1] for line in tsv[1:]]
    after = [line.split("\t")[3] for line in tsv[1:]]
    assert before == ["1/3", "2/12", "1/23", "1/4", "1/62", "1/17", "1/109", "1", "1/125"]
    assert after == ["1", "2/4", "1/4", "1", "1/23", "1/6", "1/10", "1", "1/14"]
    assert all(line.split("\t")[2] == line.split("\t")[4] == "1" for line in tsv[1:])
    assert (out_dir / "report.png").stat().st_size > 0
    assert (out_dir / "report.txt").read_text(encoding="utf-8") == capsys.readouterr().out


def test_eval_is_deterministic(table_run, tmp_path):
    idx, queries, qrels = table_run
    outs = []
    for name in ("r1", "r2"):
        main(["eval", str(idx), str(queries), str(qrels), "--out-dir", str(tmp_path / name)])
        outs.append([(tmp_path / name / f).read_bytes()
                     for f in ("report.tsv", "report.txt", "report.png")])
    assert outs[0] == outs[1]


def test_eval_empty_queries(tiny_index, tmp_path, capsys):
    q, r = tmp_path / "q.tsv", tmp_path / "r.tsv"
    q.write_text("", encoding="utf-8")
    r.write_text("", encoding="utf-8")
    assert main(["eval", str(tiny_index), str(q), str(r), "--out-dir", str(tmp_path / "o")]) == 0
    assert "empty" in capsys.readouterr().err
    assert (tmp_path / "o" / "report.tsv").read_text().splitlines() == [
        "query\tPRE_before\tRECALL_before\tPRE_after\tRECALL_after"]


def test_eval_unknown_doc_in_qrels(tiny_index, tmp_path, capsys):
    q, r = tmp_path / "q.tsv", tmp_path / "r.tsv"
    q.write_text("q1\tبعثات\tlaw\n", encoding="utf-8")
    r.write_text("q1\tlaw/a.txt\nq1\tlaw/zzz.txt\n", encoding="utf-8")
    assert main(["eval", str(tiny_index), str(q), str(r)]) == 1
    assert "r.tsv:2" in capsys.readouterr().err


def test_eval_row_errors_still_exit_zero(tiny_index, tmp_path, capsys):
    q, r = tmp_path / "q.tsv", tmp_path / "r.tsv"
    q.write_text("q1\tبعثات\tlaw\nq2\tبعثات\n", encoding="utf-8")
    r.write_text("q1\tlaw/a.txt\nq2\tlaw/a.txt\n", encoding="utf-8")
    assert main(["eval", str(tiny_index), str(q), str(r)]) == 0
    captured = capsys.readouterr()
    assert "1 of 2 queries" in captured.err
    assert "error in q2" in captured.out


def test_eval_predicted_routing(tiny_index, tmp_path, capsys):
    q, r = tmp_path / "q.tsv", tmp_path / "r.tsv"
    q.write_text("q1\tبعثات نظام\n", encoding="utf-8")
    r.write_text("q1\tlaw/a.txt\n", encoding="utf-8")
    assert main(["eval", str(tiny_index), str(q), str(r), "--routing", "predicted"]) == 0
    assert "routing: predicted (nb)" in capsys.readouterr().out


def test_generate(tmp_path, capsys):
    assert main(["generate", "synthetic", str(tmp_path / "demo")]) == 0
    assert (tmp_path / "demo" / "queries.tsv").is_file()
    assert "124 documents" in capsys.readouterr().out
    assert main(["generate", "synthetic", str(tmp_path / "demo")]) == 2
