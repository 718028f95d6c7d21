"""Raw-dump ingestion: parse, language-identify, deduplicate, length-filter.

Language identification is rank-order character n-gram profiling
(out-of-place distance between the text's n-gram ranking and per-language
profiles). Profiles are plain data, shipped for Catalan/Spanish/English and
regenerable from any monolingual corpus.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .corpus import Tweet
from .textutils import squash_spaces, strip_urls, word_count

PROFILE_MAX_ENTRIES = 400
_MIN_TEXT_CHARS = 5


@dataclass(frozen=True)
class LanguageProfile:
    """Character n-grams (n = 1..4) ranked by descending corpus frequency."""

    language: str
    ngrams: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.ngrams)) != len(self.ngrams):
            raise ValueError("profile contains duplicate n-grams")
        if len(self.ngrams) > PROFILE_MAX_ENTRIES:
            raise ValueError(f"profile exceeds {PROFILE_MAX_ENTRIES} entries")

    @property
    def ranks(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.ngrams)}

    def to_json_dict(self) -> dict:
        return {"language": self.language, "ngrams": list(self.ngrams)}

    @classmethod
    def from_json_dict(cls, d) -> "LanguageProfile":
        return cls(language=d["language"], ngrams=tuple(d["ngrams"]))


def _char_ngrams(text: str) -> Counter[str]:
    """n-grams over the casefolded, space-normalized text, word-padded."""
    grams: Counter[str] = Counter()
    norm = squash_spaces(strip_urls(text).casefold())
    for word in norm.split():
        padded = f" {word} "
        for n in range(1, 5):
            for i in range(len(padded) - n + 1):
                gram = padded[i : i + n]
                if gram != " ":
                    grams[gram] += 1
    return grams


def build_profile(texts: Iterable[str], language: str, max_entries: int = PROFILE_MAX_ENTRIES) -> LanguageProfile:
    grams: Counter[str] = Counter()
    for text in texts:
        grams.update(_char_ngrams(text))
    ranked = sorted(grams.items(), key=lambda kv: (-kv[1], kv[0]))
    return LanguageProfile(language=language, ngrams=tuple(g for g, _ in ranked[:max_entries]))


def detect_language(text: str, profiles: Sequence[LanguageProfile]) -> tuple[str, float]:
    """Best profile by out-of-place distance; ("und", 0.0) for tiny input.

    Confidence is 1 - best/worst distance over the candidates, so a text
    equally far from every profile scores 0.
    """
    if not profiles:
        raise ValueError("at least one language profile is required")
    if len(strip_urls(text).strip()) < _MIN_TEXT_CHARS:
        return ("und", 0.0)
    text_grams = [g for g, _ in sorted(_char_ngrams(text).items(), key=lambda kv: (-kv[1], kv[0]))]
    text_grams = text_grams[:PROFILE_MAX_ENTRIES]
    if not text_grams:
        return ("und", 0.0)
    distances: list[tuple[float, str]] = []
    for profile in profiles:
        ranks = profile.ranks
        penalty = len(profile.ngrams) or 1
        dist = 0.0
        for i, gram in enumerate(text_grams):
            j = ranks.get(gram)
            dist += abs(i - j) if j is not None else penalty
        distances.append((dist, profile.language))
    distances.sort()
    best_dist, best_lang = distances[0]
    worst_dist = distances[-1][0]
    confidence = 1.0 - best_dist / worst_dist if worst_dist > 0 else 0.0
    return (best_lang, confidence)


def save_profiles(profiles: Sequence[LanguageProfile], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([p.to_json_dict() for p in profiles], ensure_ascii=False, indent=1),
        encoding="utf-8",
    )


def load_profiles(path: str | Path) -> list[LanguageProfile]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [LanguageProfile.from_json_dict(d) for d in data]


def default_profiles() -> list[LanguageProfile]:
    path = Path(__file__).parent / "resources" / "langprofiles" / "profiles.json"
    return load_profiles(path)


# ---------------------------------------------------------------------------
# Deduplication and length filtering.


@dataclass
class IngestReport:
    input_count: int = 0
    kept_count: int = 0
    dropped_duplicates: int = 0
    dropped_short: int = 0
    dropped_other: int = 0
    per_language_counts: dict[str, int] = field(default_factory=dict)

    def check(self) -> None:
        total = self.kept_count + self.dropped_duplicates + self.dropped_short + self.dropped_other
        if total != self.input_count:
            raise AssertionError(f"report does not balance: {self} ")

    def to_json_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "kept_count": self.kept_count,
            "dropped_duplicates": self.dropped_duplicates,
            "dropped_short": self.dropped_short,
            "dropped_other": self.dropped_other,
            "per_language_counts": dict(sorted(self.per_language_counts.items())),
        }


def dedup_key(text: str) -> str:
    """Duplicate key: casefolded, URL-stripped, whitespace-collapsed text.

    URL stripping makes retweet chains with different link shorteners
    collapse onto one key.
    """
    return squash_spaces(strip_urls(text).casefold())


def dedup_and_filter(tweets: Sequence[Tweet], min_words: int = 3) -> tuple[list[Tweet], IngestReport]:
    """Keep the first occurrence of each normalized text, drop short tweets.

    The word count is taken on the raw text minus URLs, before any other
    preprocessing; hashtags and mentions count as words.
    """
    if min_words < 1:
        raise ValueError("min_words must be >= 1")
    report = IngestReport(input_count=len(tweets))
    seen: set[str] = set()
    kept: list[Tweet] = []
    for tweet in tweets:
        if word_count(tweet.text) < min_words:
            report.dropped_short += 1
            continue
        key = dedup_key(tweet.text)
        if key in seen:
            report.dropped_duplicates += 1
            continue
        seen.add(key)
        kept.append(tweet)
        report.per_language_counts[tweet.language] = report.per_language_counts.get(tweet.language, 0) + 1
    report.kept_count = len(kept)
    report.check()
    return kept, report


# ---------------------------------------------------------------------------
# Raw line-delimited JSON dumps.


def parse_jsonl_tweets(path: str | Path, default_language: str = "und") -> list[Tweet]:
    """Read a raw dump: one JSON object per line.

    Expected fields: id, text, user.id, optional created_at and
    retweeted_status.user.id. Lines missing id/text/user raise.
    """
    tweets: list[Tweet] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            rt = obj.get("retweeted_status")
            tweets.append(
                Tweet(
                    id=str(obj["id"]),
                    author_id=str(obj["user"]["id"]),
                    language=obj.get("lang", default_language),
                    text=obj["text"],
                    created_at=obj.get("created_at"),
                    retweet_of_author=str(rt["user"]["id"]) if rt else None,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: malformed tweet object: {exc}") from exc
    return tweets


def assign_languages(
    tweets: Sequence[Tweet],
    profiles: Optional[Sequence[LanguageProfile]] = None,
    min_confidence: float = 0.0,
) -> list[Tweet]:
    """Fill in Tweet.language via detect_language for tweets marked "und"."""
    profiles = list(profiles) if profiles is not None else default_profiles()
    out: list[Tweet] = []
    for tweet in tweets:
        if tweet.language != "und":
            out.append(tweet)
            continue
        lang, conf = detect_language(tweet.text, profiles)
        if conf < min_confidence:
            lang = "und"
        out.append(
            Tweet(
                id=tweet.id,
                author_id=tweet.author_id,
                language=lang,
                text=tweet.text,
                created_at=tweet.created_at,
                retweet_of_author=tweet.retweet_of_author,
                target=tweet.target,
            )
        )
    return out
