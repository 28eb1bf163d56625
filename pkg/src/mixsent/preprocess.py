"""Tweet normalization: URLs, mentions, hashtags, punctuation, whitespace.

The steps run in an order that preserves the markers each one needs:
URLs and mentions are removed before punctuation stripping would destroy
``://`` and ``@``, and hashtag bodies are segmented while their casing is
still intact. Lowercasing happens last.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .corpus import CodeMixedInstance

__all__ = [
    "CleanDocument",
    "strip_urls",
    "strip_mentions",
    "extract_hashtag_words",
    "strip_punctuation",
    "contract_whitespace",
    "clean",
]

_URL_RE = re.compile(r"(?:https?://|www\.)\S*")
_MENTION_RE = re.compile(r"@\w+")
_HASHTAG_RE = re.compile(r"#+(\w+)")
# Camel-case segmentation: acronym runs, capitalized words, lowercase runs,
# digit runs. Targets ASCII (the corpora are romanized).
_SEGMENT_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+|[0-9]+")


@dataclass(frozen=True)
class CleanDocument:
    """Lowercase word sequence produced by `clean`, tied to its source uid."""

    words: tuple[str, ...]
    source_uid: str


def strip_urls(text: str) -> str:
    """Remove http://, https://, and www. substrings up to the next whitespace."""
    return _URL_RE.sub("", text)


def strip_mentions(text: str) -> str:
    """Remove '@' followed by one or more word characters."""
    return _MENTION_RE.sub("", text)


def extract_hashtag_words(text: str) -> str:
    """Replace every #Body with Body split at case/digit boundaries."""

    def segment(match: re.Match) -> str:
        return " ".join(_SEGMENT_RE.findall(match.group(1)))

    return _HASHTAG_RE.sub(segment, text)


def strip_punctuation(text: str) -> str:
    """Replace every punctuation or symbol character (Unicode P and S) with a space."""
    return "".join(
        " " if unicodedata.category(ch)[0] in ("P", "S") else ch for ch in text
    )


def contract_whitespace(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


def clean(instance: CodeMixedInstance) -> CleanDocument:
    """Run the full cleaning pipeline over an instance's token surfaces."""
    text = " ".join(instance.surfaces)
    text = strip_urls(text)
    text = strip_mentions(text)
    text = extract_hashtag_words(text)
    text = strip_punctuation(text)
    text = contract_whitespace(text)
    words = tuple(text.lower().split(" ")) if text else ()
    return CleanDocument(words=words, source_uid=instance.uid)
