"""Hashtag/keyword topic filtering and candidate-hashtag ranking.

Hashtag matching is insensitive to case and diacritics (#CataluñaesEspaña
and #catalunaesespana unify). Keywords match as contiguous token runs of the
normalized text; no stemming, so every hit is auditable by a curator.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import ClassDistribution, Corpus, Tweet, distribution
from .textutils import HASHTAG_RE, match_tokens, normalize_token


@dataclass(frozen=True)
class TopicLexicon:
    """Curated topic cues: hashtags (stored without '#') and keyword phrases."""

    hashtags: frozenset[str]
    keywords: frozenset[str]

    def __post_init__(self) -> None:
        for tag in self.hashtags:
            if not tag or any(ch.isspace() for ch in tag):
                raise ValueError(f"bad hashtag entry {tag!r}")
        for kw in self.keywords:
            n_tokens = len(kw.split(" "))
            if not kw or "  " in kw or not 1 <= n_tokens <= 3:
                raise ValueError(f"bad keyword entry {kw!r} (1-3 single-spaced tokens)")

    def __len__(self) -> int:
        return len(self.hashtags) + len(self.keywords)

    @classmethod
    def build(cls, hashtags: Iterable[str] = (), keywords: Iterable[str] = ()) -> "TopicLexicon":
        return cls(
            hashtags=frozenset(normalize_token(h.lstrip("#")) for h in hashtags),
            keywords=frozenset(" ".join(match_tokens(k)) for k in keywords),
        )

    def to_json_dict(self) -> dict:
        return {"hashtags": sorted(self.hashtags), "keywords": sorted(self.keywords)}

    @classmethod
    def from_json_dict(cls, d) -> "TopicLexicon":
        return cls.build(hashtags=d.get("hashtags", ()), keywords=d.get("keywords", ()))


def load_lexicon(path: str | Path) -> TopicLexicon:
    """One entry per line; lines starting with '#' are hashtags, the rest
    keywords. Every line is data (there is no comment syntax)."""
    hashtags: list[str] = []
    keywords: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip()
        if not entry:
            continue
        if entry.startswith("#"):
            hashtags.append(entry)
        else:
            keywords.append(entry)
    return TopicLexicon.build(hashtags=hashtags, keywords=keywords)


def save_lexicon(lexicon: TopicLexicon, path: str | Path) -> None:
    lines = [f"#{tag}" for tag in sorted(lexicon.hashtags)]
    lines += sorted(lexicon.keywords)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def tweet_hashtags(text: str) -> list[str]:
    return [normalize_token(m) for m in HASHTAG_RE.findall(text)]


def extract_hashtags(corpus: Corpus) -> list[tuple[str, int]]:
    """All hashtags of the corpus, normalized, by descending frequency
    (ties lexicographic)."""
    counts: Counter[str] = Counter()
    for item in corpus:
        counts.update(tweet_hashtags(item.tweet.text))
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def match_topic(tweet: Tweet, lexicon: TopicLexicon) -> bool:
    """True iff any hashtag is in the lexicon or any keyword phrase occurs
    as a contiguous token run of the normalized text."""
    if not len(lexicon):
        raise ValueError("empty lexicon")
    if any(tag in lexicon.hashtags for tag in tweet_hashtags(tweet.text)):
        return True
    if lexicon.keywords:
        tokens = match_tokens(tweet.text)
        joined = " ".join(tokens)
        for kw in lexicon.keywords:
            if f" {kw} " in f" {joined} ":
                return True
    return False


def filter_on_topic(corpus: Corpus, lexicon: TopicLexicon) -> tuple[Corpus, ClassDistribution]:
    """Keep exactly the on-topic items and report their label distribution."""
    if not len(lexicon):
        raise ValueError("empty lexicon")
    kept = [item for item in corpus if match_topic(item.tweet, lexicon)]
    filtered = corpus.subset(kept, name=f"{corpus.name}-ontopic")
    return filtered, distribution(filtered)


def confirm_sources(corpus: Corpus, source: str) -> Corpus:
    """Stamp every item's label_source (hashtag-confirmed / lda-confirmed)."""
    return corpus.subset([item.with_source(source) for item in corpus])
