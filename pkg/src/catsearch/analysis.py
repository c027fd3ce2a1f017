"""Text analysis: raw text to an ordered list of index terms.

Stages, always applied in this order:

1. Unicode normalization (NFC, case folding, tatweel and Arabic
   diacritic removal)
2. whitespace splitting
3. symbol stripping (all Unicode punctuation; tokens stripped to nothing
   are dropped)
4. stop-word removal
5. stemming (off unless a stemmer is named)

Every stage except splitting can be switched off in ``AnalyzerConfig``.
"""

from __future__ import annotations

import hashlib
import json
import os
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable

TATWEEL = "\u0640"

# harakat, shadda, sukun, superscript alef and Quranic annotation marks
_ARABIC_MARKS = frozenset(
    [chr(c) for c in range(0x0610, 0x061B)]
    + [chr(c) for c in range(0x064B, 0x0660)]
    + ["\u0670"]
    + [chr(c) for c in range(0x06D6, 0x06EE) if unicodedata.category(chr(c)) == "Mn"]
)

# always stripped, whatever the Unicode tables say about them
EXTRA_SYMBOLS = frozenset("-_*?")

BUILTIN_STOPWORDS = "arabic"
STOPWORDS_ENV = "CATSEARCH_STOPWORDS"


class ConfigError(ValueError):
    """Analyzer configuration could not be loaded."""


def is_symbol(ch: str) -> bool:
    return ch in EXTRA_SYMBOLS or unicodedata.category(ch).startswith("P")


def normalize(text: str, strip_diacritics: bool = True) -> str:
    text = unicodedata.normalize("NFC", text).casefold()
    drop = _ARABIC_MARKS if strip_diacritics else frozenset()
    text = "".join(ch for ch in text if ch != TATWEEL and ch not in drop)
    return unicodedata.normalize("NFC", text)


def strip_symbols(token: str) -> str:
    return "".join(ch for ch in token if not is_symbol(ch))


# -- stemming ---------------------------------------------------------------

_PREFIXES = ("وال", "بال", "كال", "فال", "لل", "ال")
_SUFFIXES = ("ها", "ان", "ات", "ون", "ين", "يه", "ية", "ه", "ة", "ي")


def light_stem(term: str) -> str:
    """Strip one common Arabic prefix and one suffix, keeping >= 2 letters.

    Deliberately naive; it exists so that indexing with and without
    stemming can be compared, not to be linguistically accurate.
    """
    for p in _PREFIXES:
        if term.startswith(p) and len(term) - len(p) >= 2:
            term = term[len(p):]
            break
    for s in _SUFFIXES:
        if term.endswith(s) and len(term) - len(s) >= 2:
            term = term[: -len(s)]
            break
    return term


STEMMERS: dict[str, Callable[[str], str]] = {"light": light_stem}


# -- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class AnalyzerConfig:
    stopwords: frozenset[str] = field(default_factory=frozenset)
    strip_symbols: bool = True
    stemmer: str | None = None
    normalize_unicode: bool = True
    strip_diacritics: bool = True

    def __post_init__(self):
        if self.stemmer is not None and self.stemmer not in STEMMERS:
            raise ConfigError(f"unknown stemmer {self.stemmer!r}; "
                              f"available: {', '.join(sorted(STEMMERS))}")
        # stop words go through the same stages as text so matching is closed
        cleaned = set()
        for w in self.stopwords:
            if self.normalize_unicode:
                w = normalize(w, self.strip_diacritics)
            if self.strip_symbols:
                w = strip_symbols(w)
            if w:
                cleaned.add(w)
        object.__setattr__(self, "stopwords", frozenset(cleaned))

    def to_dict(self) -> dict:
        return {
            "stopwords": sorted(self.stopwords),
            "strip_symbols": self.strip_symbols,
            "stemmer": self.stemmer,
            "normalize_unicode": self.normalize_unicode,
            "strip_diacritics": self.strip_diacritics,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyzerConfig":
        return cls(
            stopwords=frozenset(d["stopwords"]),
            strip_symbols=d["strip_symbols"],
            stemmer=d["stemmer"],
            normalize_unicode=d["normalize_unicode"],
            strip_diacritics=d["strip_diacritics"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True,
                          separators=(",", ":"))

    def fingerprint(self) -> bytes:
        """SHA-256 over the canonical JSON form; equal configs, equal bytes."""
        return hashlib.sha256(self.to_json().encode("utf-8")).digest()


def load_stopwords(path) -> frozenset[str]:
    """Read a stop-word file: one word per line, ``#`` comments, UTF-8.

    Entries are normalized and symbol-stripped with the default pipeline.
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read stop-word file {path}: {e}") from e
    words = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        w = strip_symbols(normalize(line))
        if w:
            words.add(w)
    return frozenset(words)


def builtin_stopwords() -> frozenset[str]:
    ref = resources.files("catsearch") / "data" / "arabic_stopwords.txt"
    with resources.as_file(ref) as p:
        return load_stopwords(p)


def resolve_stopwords(spec: str | None) -> frozenset[str]:
    """Stop words named on a command line.

    ``None`` falls back to the ``CATSEARCH_STOPWORDS`` environment variable;
    an empty value or ``"none"`` means no stop words; ``"arabic"`` selects
    the bundled list; anything else is a file path.
    """
    if spec is None:
        spec = os.environ.get(STOPWORDS_ENV)
    if not spec or spec == "none":
        return frozenset()
    if spec == BUILTIN_STOPWORDS:
        return builtin_stopwords()
    return load_stopwords(spec)


# -- the pipeline -----------------------------------------------------------

def analyze(text: str, config: AnalyzerConfig | None = None) -> list[str]:
    if config is None:
        config = AnalyzerConfig()
    if config.normalize_unicode:
        text = normalize(text, config.strip_diacritics)
    tokens: Iterable[str] = text.split()
    if config.strip_symbols:
        stripped = (strip_symbols(t) for t in tokens)
        if config.normalize_unicode:
            # removing a symbol can bring a base letter and a mark together
            stripped = (unicodedata.normalize("NFC", t) for t in stripped)
        tokens = (t for t in stripped if t)
    if config.stopwords:
        tokens = (t for t in tokens if t not in config.stopwords)
    if config.stemmer is not None:
        stem = STEMMERS[config.stemmer]
        tokens = (stem(t) for t in tokens)
    return list(tokens)
