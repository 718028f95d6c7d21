"""Core domain types and the TSV/JSON corpus formats shared by every stage."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence


class StanceLabel(str, Enum):
    FAVOR = "FAVOR"
    AGAINST = "AGAINST"
    NONE = "NONE"

    def __str__(self) -> str:
        return self.value


# Incoming label spellings that are not one of the three canonical tokens.
DEFAULT_LABEL_ALIASES: dict[str, StanceLabel] = {"NEUTRAL": StanceLabel.NONE}

LABEL_SOURCES = ("manual-user", "propagated-user", "hashtag-confirmed", "lda-confirmed")
PROVENANCES = ("seed-manual", "propagated")


class CorpusError(Exception):
    """Base class for corpus loading/validation failures."""


class SchemaError(CorpusError):
    """Header or column layout does not match the declared schema."""


class DuplicateIdError(CorpusError):
    def __init__(self, ids: Sequence[str]):
        self.ids = list(ids)
        super().__init__(f"duplicate tweet ids: {', '.join(self.ids)}")


class UnlabeledItemError(CorpusError):
    def __init__(self, tweet_id: str):
        self.tweet_id = tweet_id
        super().__init__(f"item {tweet_id!r} has no stance label")


def parse_label(token: str, aliases: Optional[Mapping[str, StanceLabel]] = None) -> StanceLabel:
    """Map a raw label token to a StanceLabel, honoring the alias table."""
    canon = token.strip().upper()
    try:
        return StanceLabel(canon)
    except ValueError:
        table = DEFAULT_LABEL_ALIASES if aliases is None else aliases
        if canon in table:
            return table[canon]
        raise ValueError(f"unknown stance label {token!r}") from None


@dataclass(frozen=True)
class Tweet:
    """A single message. Ids are opaque strings and never parsed as numbers."""

    id: str
    author_id: str = ""
    language: str = "und"
    text: str = ""
    created_at: Optional[str] = None
    retweet_of_author: Optional[str] = None
    target: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"tweet {self.id!r} has empty text")

    def to_json_dict(self) -> dict:
        d = {"id": self.id, "author_id": self.author_id, "language": self.language, "text": self.text}
        if self.created_at is not None:
            d["created_at"] = self.created_at
        if self.retweet_of_author is not None:
            d["retweet_of_author"] = self.retweet_of_author
        if self.target is not None:
            d["target"] = self.target
        return d

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "Tweet":
        return cls(
            id=str(d["id"]),
            author_id=str(d.get("author_id", "")),
            language=d.get("language", "und"),
            text=d["text"],
            created_at=d.get("created_at"),
            retweet_of_author=d.get("retweet_of_author"),
            target=d.get("target"),
        )


@dataclass(frozen=True)
class LabeledTweet:
    tweet: Tweet
    label: Optional[StanceLabel] = None
    label_source: Optional[str] = None

    def __post_init__(self) -> None:
        if self.label_source is not None and self.label_source not in LABEL_SOURCES:
            raise ValueError(f"unknown label_source {self.label_source!r}")

    def with_source(self, source: str) -> "LabeledTweet":
        return replace(self, label_source=source)

    def to_json_dict(self) -> dict:
        d = {"tweet": self.tweet.to_json_dict()}
        if self.label is not None:
            d["label"] = self.label.value
        if self.label_source is not None:
            d["label_source"] = self.label_source
        return d

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "LabeledTweet":
        label = d.get("label")
        return cls(
            tweet=Tweet.from_json_dict(d["tweet"]),
            label=None if label is None else parse_label(label),
            label_source=d.get("label_source"),
        )


@dataclass(frozen=True)
class AccountLabel:
    """Stance assigned at user level. hop is 0 exactly for manual seeds."""

    author_id: str
    label: StanceLabel
    provenance: str = "seed-manual"
    hop: int = 0

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.hop < 0:
            raise ValueError("hop must be non-negative")
        if (self.hop == 0) != (self.provenance == "seed-manual"):
            raise ValueError("hop 0 is reserved for seed-manual accounts (and vice versa)")

    def to_json_dict(self) -> dict:
        return {
            "author_id": self.author_id,
            "label": self.label.value,
            "provenance": self.provenance,
            "hop": self.hop,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "AccountLabel":
        return cls(
            author_id=str(d["author_id"]),
            label=parse_label(d["label"]),
            provenance=d.get("provenance", "seed-manual"),
            hop=int(d.get("hop", 0)),
        )


@dataclass(frozen=True)
class ClassDistribution:
    counts: Mapping[StanceLabel, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def get(self, label: StanceLabel) -> int:
        return self.counts.get(label, 0)

    def proportions(self) -> dict[StanceLabel, float]:
        n = self.total
        if n == 0:
            return {lab: 0.0 for lab in StanceLabel}
        return {lab: self.get(lab) / n for lab in StanceLabel}

    def to_json_dict(self) -> dict:
        return {
            "counts": {lab.value: self.get(lab) for lab in StanceLabel},
            "total": self.total,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "ClassDistribution":
        return cls(counts={parse_label(k): int(v) for k, v in d["counts"].items()})


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of (optionally labeled) tweets with unique ids."""

    name: str
    language: str
    items: tuple[LabeledTweet, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        dups: list[str] = []
        for item in self.items:
            tid = item.tweet.id
            if tid in seen:
                dups.append(tid)
            seen.add(tid)
        if dups:
            raise DuplicateIdError(dups)
        if self.language != "mixed":
            for item in self.items:
                lang = item.tweet.language
                if lang not in ("und", self.language):
                    raise ValueError(
                        f"tweet {item.tweet.id!r} has language {lang!r} in corpus {self.language!r}"
                    )

    @classmethod
    def from_items(cls, items: Iterable[LabeledTweet], name: str = "corpus", language: str = "mixed") -> "Corpus":
        return cls(name=name, language=language, items=tuple(items))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[LabeledTweet]:
        return iter(self.items)

    def tweets(self) -> list[Tweet]:
        return [item.tweet for item in self.items]

    def ids(self) -> list[str]:
        return [item.tweet.id for item in self.items]

    def subset(self, keep: Iterable[LabeledTweet], name: Optional[str] = None) -> "Corpus":
        return Corpus(name=name or self.name, language=self.language, items=tuple(keep))

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "language": self.language,
            "items": [item.to_json_dict() for item in self.items],
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "Corpus":
        return cls(
            name=d["name"],
            language=d["language"],
            items=tuple(LabeledTweet.from_json_dict(x) for x in d["items"]),
        )


def distribution(corpus: Corpus) -> ClassDistribution:
    """Count items per stance label; every item must carry a label."""
    counts = {lab: 0 for lab in StanceLabel}
    for item in corpus:
        if item.label is None:
            raise UnlabeledItemError(item.tweet.id)
        counts[item.label] += 1
    return ClassDistribution(counts=counts)


# ---------------------------------------------------------------------------
# TSV format.
#
# One record per line, UTF-8, columns per schema. Tabs and newlines inside
# text fields are escaped as \t and \n so records stay line-delimited.

FIELD_NAMES = (
    "id",
    "label",
    "text",
    "author",
    "language",
    "target",
    "created_at",
    "retweet_of",
    "label_source",
    "ignore",
)


def escape_field(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def unescape_field(value: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            mapped = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


@dataclass(frozen=True)
class ColumnSchema:
    """Maps TSV columns to tweet fields.

    ``fields`` names the meaning of each column in order, drawn from
    FIELD_NAMES. ``has_header`` files must start with a header row whose
    cells equal the field names (an ``ignore`` column may carry any name).
    """

    fields: tuple[str, ...]
    has_header: bool = True
    header_names: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        unknown = [f for f in self.fields if f not in FIELD_NAMES]
        if unknown:
            raise SchemaError(f"unknown schema fields: {unknown}")
        if "id" not in self.fields or "text" not in self.fields:
            raise SchemaError("schema must map an 'id' and a 'text' column")
        for f in self.fields:
            if f != "ignore" and self.fields.count(f) > 1:
                raise SchemaError(f"schema maps field {f!r} twice")

    def header_row(self) -> tuple[str, ...]:
        return self.header_names if self.header_names is not None else self.fields


# The layout of the released corpus files: id, label, text.
CIC_SCHEMA = ColumnSchema(fields=("id", "label", "text"))
# SemEval distribution: ID <TAB> Target <TAB> Tweet <TAB> Stance.
SEMEVAL_SCHEMA = ColumnSchema(
    fields=("id", "target", "text", "label"),
    header_names=("ID", "Target", "Tweet", "Stance"),
)
# Internal pipeline format carrying full tweet metadata.
PIPELINE_SCHEMA = ColumnSchema(
    fields=("id", "author", "language", "created_at", "retweet_of", "label", "label_source", "text")
)


@dataclass
class RowError:
    line_number: int
    reason: str
    raw: str


@dataclass
class LoadResult:
    corpus: Corpus
    errors: list[RowError] = field(default_factory=list)


def _tweet_from_row(cells: Sequence[str], schema: ColumnSchema, aliases) -> LabeledTweet:
    values = {f: unescape_field(cells[i]) for i, f in enumerate(schema.fields) if f != "ignore"}
    label_token = values.pop("label", "").strip()
    label = parse_label(label_token, aliases) if label_token else None
    tweet = Tweet(
        id=values["id"],
        author_id=values.get("author", ""),
        language=values.get("language", "und") or "und",
        text=values["text"],
        created_at=values.get("created_at") or None,
        retweet_of_author=values.get("retweet_of") or None,
        target=values.get("target") or None,
    )
    return LabeledTweet(tweet=tweet, label=label, label_source=values.get("label_source") or None)


def load_corpus(
    path: str | Path,
    schema: ColumnSchema,
    name: Optional[str] = None,
    language: str = "mixed",
    aliases: Optional[Mapping[str, StanceLabel]] = None,
) -> LoadResult:
    """Read a TSV corpus.

    Rows that do not fit the schema are collected into ``errors`` instead of
    being silently dropped; duplicate ids and a malformed header raise.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    start = 0
    if schema.has_header:
        if not lines:
            raise SchemaError(f"{path}: empty file, expected a header row")
        header = tuple(lines[0].split("\t"))
        expected = schema.header_row()
        if len(header) != len(expected) or any(
            f != "ignore" and h != e for h, e, f in zip(header, expected, schema.fields)
        ):
            raise SchemaError(f"{path}: header {header!r} does not match schema {expected!r}")
        start = 1

    items: list[LabeledTweet] = []
    errors: list[RowError] = []
    seen: dict[str, int] = {}
    dups: list[str] = []
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != len(schema.fields):
            errors.append(RowError(lineno, f"expected {len(schema.fields)} columns, got {len(cells)}", line))
            continue
        try:
            item = _tweet_from_row(cells, schema, aliases)
        except (ValueError, KeyError) as exc:
            errors.append(RowError(lineno, str(exc), line))
            continue
        if item.tweet.id in seen:
            dups.append(item.tweet.id)
            continue
        seen[item.tweet.id] = lineno
        items.append(item)
    if dups:
        raise DuplicateIdError(dups)
    corpus = Corpus(name=name or path.stem, language=language, items=tuple(items))
    return LoadResult(corpus=corpus, errors=errors)


def save_corpus(corpus: Corpus, path: str | Path, schema: ColumnSchema) -> None:
    """Write a corpus in the given schema; inverse of load_corpus."""
    path = Path(path)
    rows: list[str] = []
    if schema.has_header:
        rows.append("\t".join(schema.header_row()))
    for item in corpus:
        cells: list[str] = []
        for f in schema.fields:
            if f == "id":
                v = item.tweet.id
            elif f == "label":
                v = item.label.value if item.label is not None else ""
            elif f == "text":
                v = item.tweet.text
            elif f == "author":
                v = item.tweet.author_id
            elif f == "language":
                v = item.tweet.language
            elif f == "target":
                v = item.tweet.target or ""
            elif f == "created_at":
                v = item.tweet.created_at or ""
            elif f == "retweet_of":
                v = item.tweet.retweet_of_author or ""
            elif f == "label_source":
                v = item.label_source or ""
            else:  # ignore
                v = ""
            cells.append(escape_field(v))
        rows.append("\t".join(cells))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
