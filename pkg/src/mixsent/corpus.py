"""Annotated code-mixed tweet corpora: parsing, serialization, splitting.

Corpus file format (UTF-8 text): blocks separated by one blank line.
Each block is a header line ``meta <uid> [<sentiment>]`` followed by one
or more token lines ``<surface>\\t<tag>`` (single tab). Sentiment is one
of negative/neutral/positive; tags are ENG, HIN, or O. Trailing
whitespace on a line is ignored; any other deviation is a parse error
reported with its line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import CorpusFormatError

__all__ = [
    "SentimentLabel",
    "LangTag",
    "CodeMixedInstance",
    "CorpusSplit",
    "parse_corpus",
    "parse_corpus_text",
    "format_corpus",
    "write_corpus",
    "split_corpus",
    "class_histogram",
]


class SentimentLabel(str, Enum):
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"


# Fixed total order used by the label codec and report rows.
LABEL_ORDER = (SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL, SentimentLabel.POSITIVE)


class LangTag(str, Enum):
    ENG = "ENG"
    HIN = "HIN"
    OTHER = "O"


@dataclass(frozen=True)
class CodeMixedInstance:
    """One tweet: unique id, (surface, language-tag) tokens, optional label."""

    uid: str
    tokens: tuple[tuple[str, LangTag], ...]
    label: SentimentLabel | None = None

    def __post_init__(self):
        if not self.uid:
            raise ValueError("instance uid must be nonempty")
        if not self.tokens:
            raise ValueError(f"instance {self.uid!r}: token list must be nonempty")
        for surface, _ in self.tokens:
            if "\t" in surface or "\n" in surface:
                raise ValueError(
                    f"instance {self.uid!r}: token surface may not contain tab or newline"
                )

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(surface for surface, _ in self.tokens)


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[CodeMixedInstance, ...]
    validation: tuple[CodeMixedInstance, ...]
    seed: int


def _parse_meta_line(line: str, lineno: int) -> tuple[str, SentimentLabel | None]:
    fields = line.split()
    if not fields or fields[0] != "meta":
        raise CorpusFormatError(lineno, f"expected 'meta' header, got {line!r}")
    if len(fields) < 2 or len(fields) > 3:
        raise CorpusFormatError(lineno, f"malformed meta line {line!r}")
    uid = fields[1]
    label = None
    if len(fields) == 3:
        try:
            label = SentimentLabel(fields[2])
        except ValueError:
            raise CorpusFormatError(lineno, f"unknown sentiment {fields[2]!r}") from None
    return uid, label


def _parse_token_line(line: str, lineno: int) -> tuple[str, LangTag]:
    parts = line.split("\t")
    if len(parts) != 2:
        raise CorpusFormatError(
            lineno, f"token line must be '<surface>\\t<tag>', got {line!r}"
        )
    surface, tag_text = parts
    if not surface:
        raise CorpusFormatError(lineno, "empty token surface")
    try:
        tag = LangTag(tag_text)
    except ValueError:
        raise CorpusFormatError(lineno, f"unknown language tag {tag_text!r}") from None
    return surface, tag


def parse_corpus_text(text: str) -> list[CodeMixedInstance]:
    """Parse corpus-format text into instances; see the module docstring."""
    instances: list[CodeMixedInstance] = []
    seen_uids: set[str] = set()

    header: tuple[str, SentimentLabel | None] | None = None
    header_line = 0
    tokens: list[tuple[str, LangTag]] = []

    def close_block(lineno: int):
        nonlocal header, tokens
        uid, label = header  # type: ignore[misc]
        if not tokens:
            raise CorpusFormatError(header_line, f"block {uid!r} has no token lines")
        instances.append(CodeMixedInstance(uid=uid, tokens=tuple(tokens), label=label))
        header = None
        tokens = []

    lines = text.split("\n")
    # A trailing newline produces one final empty element; drop just that one.
    if lines and lines[-1] == "":
        lines.pop()

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip()
        if line == "":
            if header is None:
                raise CorpusFormatError(lineno, "unexpected blank line")
            close_block(lineno)
            continue
        if header is None:
            uid, label = _parse_meta_line(line, lineno)
            if uid in seen_uids:
                raise CorpusFormatError(lineno, f"duplicate uid {uid!r}")
            seen_uids.add(uid)
            header = (uid, label)
            header_line = lineno
        else:
            tokens.append(_parse_token_line(line, lineno))

    if header is not None:
        close_block(len(lines))
    return instances


def parse_corpus(path: str | Path) -> list[CodeMixedInstance]:
    """Parse a corpus file; raises CorpusFormatError with a line number."""
    return parse_corpus_text(Path(path).read_text(encoding="utf-8"))


def format_corpus(instances: list[CodeMixedInstance] | tuple[CodeMixedInstance, ...]) -> str:
    """Render instances back to corpus-format text (parse round-trips)."""
    blocks = []
    for inst in instances:
        header = f"meta {inst.uid}"
        if inst.label is not None:
            header += f" {inst.label.value}"
        lines = [header] + [f"{surface}\t{tag.value}" for surface, tag in inst.tokens]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def write_corpus(path: str | Path, instances) -> None:
    Path(path).write_text(format_corpus(list(instances)), encoding="utf-8")


def split_corpus(corpus, validation_fraction: float, seed: int) -> CorpusSplit:
    """Shuffle deterministically and split off a validation part.

    The shuffle is a permutation drawn from numpy's Philox counter-based
    generator seeded with ``seed``, so splits are reproducible across
    platforms. Validation size is round(fraction * N); the first chunk of
    the shuffled order becomes the validation part.
    """
    corpus = list(corpus)
    n = len(corpus)
    if n < 2:
        raise ValueError("corpus must contain at least 2 instances to split")
    if not 0.0 < validation_fraction < 1.0:
        raise ValueError(f"validation_fraction must be in (0, 1), got {validation_fraction}")
    n_val = round(validation_fraction * n)
    if n_val < 1 or n_val >= n:
        raise ValueError(
            f"validation_fraction {validation_fraction} leaves an empty part for {n} instances"
        )
    rng = np.random.Generator(np.random.Philox(seed))
    order = rng.permutation(n)
    validation = tuple(corpus[i] for i in order[:n_val])
    train = tuple(corpus[i] for i in order[n_val:])
    return CorpusSplit(train=train, validation=validation, seed=seed)


def class_histogram(corpus) -> dict[SentimentLabel, int]:
    """Label counts over the labeled instances only; all three keys present."""
    counts = {label: 0 for label in LABEL_ORDER}
    for inst in corpus:
        if inst.label is not None:
            counts[inst.label] += 1
    return counts
