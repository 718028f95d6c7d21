"""The four tweet-cleaning recipes (Types A-D) and their shared primitives.

Type A is the aggressive recipe feeding bag-of-words models: lemmatized,
lowercased, diacritics stripped, stopwords and short tokens dropped. Type B
keeps stopwords and diacritics so tokens still hit pre-trained embedding
vocabularies. Types C and D only peel Twitter syntax off the surface; D is
the raw view shown to human curators.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional

from .textutils import (
    MENTION_RE,
    RT_RE,
    collapse_spaces,
    strip_diacritics,
    strip_emojis,
    strip_urls,
)

_REPEAT_RE = re.compile(r"(.)\1{2,}", flags=re.DOTALL)
_DIGIT_RE = re.compile(r"\d+")


class PreprocessType(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


class ResourceError(Exception):
    """Raised when a recipe needs stopwords/lemmas that were not loaded."""


@dataclass
class PreprocessResources:
    """Per-language stopword sets and dictionary-lookup lemma maps.

    Stopwords are stored casefolded and diacritic-stripped (they are matched
    against Type A tokens, which have both applied). Lemma map keys are
    casefolded only; a lookup miss leaves the token unchanged.
    """

    stopwords: dict[str, frozenset[str]] = field(default_factory=dict)
    lemma_map: dict[str, dict[str, str]] = field(default_factory=dict)
    source_hashes: dict[str, str] = field(default_factory=dict)

    def add_stopwords(self, language: str, words) -> None:
        self.stopwords[language] = frozenset(strip_diacritics(w.casefold()) for w in words)

    def add_lemmas(self, language: str, pairs) -> None:
        # First entry wins: the dictionary does not deal with ambiguity.
        table = self.lemma_map.setdefault(language, {})
        for lemma, form in pairs:
            table.setdefault(form.casefold(), lemma.casefold())

    def load_stopwords_file(self, language: str, path: str | Path) -> None:
        path = Path(path)
        data = path.read_text(encoding="utf-8")
        self.add_stopwords(language, (w for w in data.split() if w))
        self.source_hashes[f"stopwords:{language}"] = hashlib.sha256(data.encode()).hexdigest()

    def load_lemmas_file(self, language: str, path: str | Path) -> None:
        """Two-column TSV, lemma<TAB>form, one inflected form per line."""
        path = Path(path)
        data = path.read_text(encoding="utf-8")
        pairs = []
        for line in data.splitlines():
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ResourceError(f"{path}: expected 'lemma<TAB>form', got {line!r}")
            pairs.append((parts[0], parts[1]))
        self.add_lemmas(language, pairs)
        self.source_hashes[f"lemmas:{language}"] = hashlib.sha256(data.encode()).hexdigest()

    def require(self, language: str) -> None:
        if language not in self.stopwords or language not in self.lemma_map:
            raise ResourceError(f"no stopwords/lemmas loaded for language {language!r}")


def lemmatize(token: str, lemma_map: Mapping[str, str]) -> str:
    return lemma_map.get(token, token)


def squeeze_repeats(text: str) -> str:
    """Replace any run of three or more identical characters with one.

    Runs of exactly two are kept: doubled letters are legitimate
    orthography, elongations of three or more are expressive.
    """
    return _REPEAT_RE.sub(r"\1", text)


def _strip_punct(text: str, keep: frozenset[str] = frozenset()) -> str:
    return "".join(
        ch for ch in text if ch in keep or not unicodedata.category(ch).startswith("P")
    )


_KEEP_HASH = frozenset("#")


def preprocess(
    text: str,
    type: PreprocessType,
    resources: Optional[PreprocessResources] = None,
    language: Optional[str] = None,
) -> str:
    """Apply one cleaning recipe. Types A and B require language resources."""
    type = PreprocessType(type)
    if type in (PreprocessType.A, PreprocessType.B):
        if resources is None or language is None:
            raise ResourceError(f"type {type.value} needs resources and a language")
        resources.require(language)
        return _preprocess_ab(text, type, resources, language)
    return _preprocess_cd(text, type)


def _preprocess_cd(text: str, type: PreprocessType) -> str:
    out = strip_urls(text)
    out = out.replace("@", "").replace("#", "")
    if type is PreprocessType.C:
        out = _strip_punct(out)
    return collapse_spaces(out)


def _preprocess_ab(
    text: str, type: PreprocessType, resources: PreprocessResources, language: str
) -> str:
    out = strip_urls(text)
    out = RT_RE.sub("", out)
    out = MENTION_RE.sub("", out)
    out = strip_emojis(out)
    out = _DIGIT_RE.sub("", out)
    out = _strip_punct(out, keep=_KEEP_HASH)
    # Squeeze only after every character-merging normalization (casefold,
    # and diacritic stripping for A): runs like "EEe" or "EEÈ" must collapse
    # the same way on every pass, or the recipes stop being idempotent.
    out = out.casefold()
    if type is PreprocessType.A:
        out = strip_diacritics(out)
    out = squeeze_repeats(out)
    tokens = out.split()
    if type is PreprocessType.A:
        stop = resources.stopwords[language]
        tokens = [t for t in tokens if t not in stop]
        tokens = [t for t in tokens if t.startswith("#") or len(t) >= 3]
    table = resources.lemma_map[language]
    tokens = [lemmatize(t, table) for t in tokens]
    return " ".join(tokens)


# ---------------------------------------------------------------------------
# Bundled resources.

_RESOURCE_DIR = Path(__file__).parent / "resources"


def bundled_resource_dir() -> Path:
    return _RESOURCE_DIR


def load_default_resources(languages: tuple[str, ...] = ("es", "ca", "en")) -> PreprocessResources:
    """Load the stopword lists and lemma dictionaries shipped with the package.

    These are miniature fixtures sufficient for tests and the demo pipeline;
    real corpus runs should point at full resource files via the CLI flags.
    """
    res = PreprocessResources()
    for lang in languages:
        sw = _RESOURCE_DIR / "stopwords" / f"{lang}.txt"
        lm = _RESOURCE_DIR / "lemmas" / f"{lang}.tsv"
        if sw.exists():
            res.load_stopwords_file(lang, sw)
        if lm.exists():
            res.load_lemmas_file(lang, lm)
        else:
            res.add_lemmas(lang, [])
    return res
