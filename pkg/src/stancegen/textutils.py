"""Low-level text helpers shared by ingestion, topic filtering and preprocessing."""

from __future__ import annotations

import re
import unicodedata

# Scheme-based URLs plus bare t.co shortener tokens.
URL_RE = re.compile(r"https?://\S+|\bt\.co/\S+")
MENTION_RE = re.compile(r"@\w+")
HASHTAG_RE = re.compile(r"#(\w+)")
# The retweet marker is the standalone uppercase token RT.
RT_RE = re.compile(r"(?<!\w)RT(?!\w)")
DIGIT_RE = re.compile(r"\d")
WORD_RE = re.compile(r"\w+")

# Unicode ranges treated as emoji. Kept deliberately explicit so the exact
# behaviour is auditable; see README for the block list.
_EMOJI_RANGES = (
    (0x1F1E6, 0x1F1FF),  # regional indicators (flags)
    (0x1F300, 0x1F5FF),  # misc symbols and pictographs (incl. skin tones)
    (0x1F600, 0x1F64F),  # emoticons
    (0x1F680, 0x1F6FF),  # transport and map symbols
    (0x1F900, 0x1F9FF),  # supplemental symbols and pictographs
    (0x1FA70, 0x1FAFF),  # symbols and pictographs extended-A
    (0x2600, 0x27BF),    # misc symbols + dingbats
    (0x2B00, 0x2BFF),    # misc symbols and arrows (stars, squares)
    (0xFE00, 0xFE0F),    # variation selectors
    (0x200D, 0x200D),    # zero-width joiner
    (0x20E3, 0x20E3),    # combining enclosing keycap
)


def is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def strip_emojis(text: str) -> str:
    return "".join(ch for ch in text if not is_emoji(ch))


def strip_urls(text: str) -> str:
    return URL_RE.sub("", text)


def strip_diacritics(text: str) -> str:
    """Remove combining marks: 'cayó' -> 'cayo', 'ñ' -> 'n'.

    Canonical (NFD) decomposition only: compatibility forms like '¼' must
    not expand into fresh digits after the digit-stripping steps ran.
    """
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def normalize_token(token: str) -> str:
    """Casefold + strip diacritics; the normal form for lexicon matching."""
    return strip_diacritics(token.casefold())


def collapse_spaces(text: str) -> str:
    """Map every whitespace character to a space and trim the ends.

    Interior runs are preserved deliberately: removals elsewhere in the
    pipeline must not silently rewrite spacing the author produced.
    """
    return "".join(" " if ch.isspace() else ch for ch in text).strip()


def squash_spaces(text: str) -> str:
    """Collapse any whitespace run to a single space and trim."""
    return " ".join(text.split())


def words(text: str) -> list[str]:
    """Whitespace-separated tokens of the URL-stripped text."""
    return strip_urls(text).split()


def word_count(text: str) -> int:
    return len(words(text))


def match_tokens(text: str) -> list[str]:
    """Unicode word tokens of the normalized text, for keyword matching."""
    return WORD_RE.findall(normalize_token(text))
