import pytest

from catsearch.corpus import Document
from catsearch.index import build

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): exit criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    n, title = marker.args
    prev = _acceptance.get(n, (title, "PASS"))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    _acceptance[n] = (title, "FAIL" if failed or prev[1] == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        title, status = _acceptance[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title}")


def make_docs(spec):
    """{doc_id: (category, text)} -> list of Documents."""
    return [Document(d, d, cat, text) for d, (cat, text) in spec.items()]


def index_of(spec, config=None):
    return build(make_docs(spec), config)


@pytest.fixture
def two_doc_index():
    return index_of({"D1": ("A", "x y x"), "D2": ("B", "y")})


@pytest.fixture
def corpus_tree(tmp_path):
    """Write {relative path: text} under tmp_path/corpus and return the root."""
    def write(files):
        root = tmp_path / "corpus"
        root.mkdir(exist_ok=True)
        for rel, content in files.items():
            p = root / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(content, bytes):
                p.write_bytes(content)
            else:
                p.write_text(content, encoding="utf-8")
        return root
    return write
