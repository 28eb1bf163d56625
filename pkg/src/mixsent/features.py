"""Feature extraction: TF-IDF, pooled embeddings, and lexicon/readability scores.

A document becomes one fixed-length vector of three blocks, concatenated
in canonical order:

  * TF-IDF block (vocabulary size V): raw term count times smoothed idf,
    L2-normalized per document. idf(w) = ln((1 + n_docs) / (1 + df(w))) + 1.
  * embedding block (dimension d): arithmetic mean of the word vectors
    found in the embedding table, zero vector when none match.
  * auxiliary block (12 values, fixed layout):
      0 humor_label   1 humor_score  2 hate_label     3 offensive_label
      4 senti_min     5 senti_max    6 senti_mean     7 senti_sum
      8 pos_count     9 neg_count   10 easy_ratio    11 difficult_ratio

The aux layout is frozen; persisted models rely on it.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import EmbeddingFormatError, LexiconFormatError
from .preprocess import CleanDocument

__all__ = [
    "TfidfModel",
    "EmbeddingTable",
    "Aggregation",
    "LexiconScorer",
    "ScorerSet",
    "ReadabilityConfig",
    "FeatureVector",
    "AUX_DIM",
    "fit_tfidf",
    "transform_tfidf",
    "load_embeddings",
    "pool_embedding",
    "load_lexicon",
    "load_word_list",
    "score_humor",
    "score_hate_offense",
    "wordwise_sentiment_stats",
    "count_syllables",
    "readability_counts",
    "assemble",
]

AUX_DIM = 12


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    n_docs: int


def fit_tfidf(docs: list[CleanDocument]) -> TfidfModel:
    """Build the vocabulary (lexicographic indexing) and smoothed idf weights."""
    if not docs:
        raise ValueError("fit_tfidf needs at least one document")
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc.words))
    if not df:
        raise ValueError("all documents are empty; vocabulary would be empty")
    vocabulary = {word: i for i, word in enumerate(sorted(df))}
    n = len(docs)
    idf = np.empty(len(vocabulary))
    for word, i in vocabulary.items():
        idf[i] = math.log((1 + n) / (1 + df[word])) + 1.0
    return TfidfModel(vocabulary=vocabulary, idf=idf, n_docs=n)


def transform_tfidf(model: TfidfModel, doc: CleanDocument) -> dict[int, float]:
    """Sparse L2-normalized TF-IDF weights; out-of-vocabulary words are ignored."""
    counts = Counter(doc.words)
    weights = {}
    for word, count in counts.items():
        i = model.vocabulary.get(word)
        if i is not None:
            weights[i] = count * float(model.idf[i])
    norm = math.sqrt(sum(v * v for v in weights.values()))
    if norm > 0.0:
        weights = {i: v / norm for i, v in weights.items()}
    return weights


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Load `word v1 ... vd` lines; the first line fixes the dimension.

    Duplicate words keep the last occurrence and emit a warning.
    """
    dim = None
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            if not values:
                raise EmbeddingFormatError(lineno, f"no vector components for {word!r}")
            try:
                vec = np.array([float(v) for v in values])
            except ValueError:
                raise EmbeddingFormatError(
                    lineno, f"non-numeric vector component for {word!r}"
                ) from None
            if not np.isfinite(vec).all():
                raise EmbeddingFormatError(lineno, f"non-finite component for {word!r}")
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise EmbeddingFormatError(
                    lineno, f"expected {dim} components, got {len(vec)}"
                )
            if word in vectors:
                warnings.warn(
                    f"duplicate embedding for {word!r} (line {lineno}); keeping the last",
                    stacklevel=2,
                )
            vectors[word] = vec
    if dim is None:
        raise EmbeddingFormatError(1, "embedding file is empty")
    return EmbeddingTable(dim=dim, vectors=vectors)


def pool_embedding(table: EmbeddingTable, doc: CleanDocument) -> np.ndarray:
    """Mean of the in-table word vectors; zero vector when nothing matches."""
    hits = [table.vectors[w] for w in doc.words if w in table.vectors]
    if not hits:
        return np.zeros(table.dim)
    return np.mean(hits, axis=0)


class Aggregation(Enum):
    BINARY_LABEL_AND_SCORE = "binary_label_and_score"
    PER_WORD_STATS = "per_word_stats"


@dataclass(frozen=True)
class LexiconScorer:
    """Word-score lookup standing in for the external classifiers.

    Binary scorers (humor/hate/offense) carry scores in [0, 1]; the
    per-word sentiment scorer carries scores in [-1, 1].
    """

    name: str
    word_scores: dict[str, float]
    aggregation: Aggregation

    def __post_init__(self):
        lo = -1.0 if self.aggregation is Aggregation.PER_WORD_STATS else 0.0
        for word, score in self.word_scores.items():
            if not lo <= score <= 1.0:
                raise ValueError(
                    f"lexicon {self.name!r}: score {score} for {word!r} outside [{lo}, 1]"
                )


@dataclass(frozen=True)
class ScorerSet:
    humor: LexiconScorer
    sentiment: LexiconScorer
    hate: LexiconScorer
    offense: LexiconScorer


def load_lexicon(path: str | Path, name: str, aggregation: Aggregation) -> LexiconScorer:
    """Load `word<TAB>score` lines into a scorer, validating the score range."""
    word_scores: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconFormatError(lineno, f"expected 'word<TAB>score', got {line!r}")
            word, score_text = parts
            try:
                score = float(score_text)
            except ValueError:
                raise LexiconFormatError(lineno, f"bad score {score_text!r}") from None
            word_scores[word] = score
    try:
        return LexiconScorer(name=name, word_scores=word_scores, aggregation=aggregation)
    except ValueError as exc:
        raise LexiconFormatError(0, str(exc)) from None


def load_word_list(path: str | Path) -> frozenset[str]:
    """One word per line; blank lines ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            word = raw.strip()
            if word:
                words.add(word)
    return frozenset(words)


def _match_score(scorer: LexiconScorer, doc: CleanDocument) -> float:
    # Matched scores normalized by total word count, clamped into [0, 1].
    if not doc.words:
        return 0.0
    total = sum(scorer.word_scores.get(w, 0.0) for w in doc.words)
    return min(max(total / len(doc.words), 0.0), 1.0)


def score_humor(scorer: LexiconScorer, doc: CleanDocument) -> tuple[int, float]:
    score = _match_score(scorer, doc)
    return (1 if score >= 0.5 else 0), score


def score_hate_offense(
    hate: LexiconScorer, offense: LexiconScorer, doc: CleanDocument
) -> tuple[int, int]:
    hate_score = _match_score(hate, doc)
    offense_score = _match_score(offense, doc)
    return (1 if hate_score >= 0.5 else 0), (1 if offense_score >= 0.5 else 0)


def wordwise_sentiment_stats(
    scorer: LexiconScorer, doc: CleanDocument
) -> tuple[float, float, float, float, int, int]:
    """(min, max, mean, sum, pos_count, neg_count) over per-word scores.

    Unmatched words score 0; an empty document yields all zeros.
    """
    if not doc.words:
        return (0.0, 0.0, 0.0, 0.0, 0, 0)
    scores = [scorer.word_scores.get(w, 0.0) for w in doc.words]
    pos = sum(1 for s in scores if s > 0)
    neg = sum(1 for s in scores if s < 0)
    total = sum(scores)
    lo, hi = min(scores), max(scores)
    # summation rounding can push the mean an ulp outside [lo, hi]
    mean = min(max(total / len(scores), lo), hi)
    return (lo, hi, mean, total, pos, neg)


@dataclass(frozen=True)
class ReadabilityConfig:
    easy_words: frozenset[str]
    difficult_syllable_threshold: int = 3

    def __post_init__(self):
        if self.difficult_syllable_threshold < 1:
            raise ValueError("difficult_syllable_threshold must be >= 1")


def count_syllables(word: str) -> int:
    """Vowel-run count with a silent-e correction, floored at 1.

    Counts maximal runs of [aeiouy]; subtracts one when the word ends in
    'e' preceded by a consonant and more than one run was found.
    """
    vowels = "aeiouy"
    runs = 0
    in_run = False
    for ch in word:
        if ch in vowels:
            if not in_run:
                runs += 1
            in_run = True
        else:
            in_run = False
    if (
        runs > 1
        and len(word) >= 2
        and word.endswith("e")
        and word[-2] not in vowels
    ):
        runs -= 1
    return max(runs, 1)


def readability_counts(
    config: ReadabilityConfig, doc: CleanDocument
) -> tuple[int, int, float, float]:
    """(easy, difficult, easy_ratio, difficult_ratio) for a document.

    A word is difficult when it is not in the easy list and has at least
    the threshold number of syllables; otherwise it is easy.
    """
    if not doc.words:
        return (0, 0, 0.0, 0.0)
    difficult = sum(
        1
        for w in doc.words
        if w not in config.easy_words
        and count_syllables(w) >= config.difficult_syllable_threshold
    )
    easy = len(doc.words) - difficult
    n = len(doc.words)
    return (easy, difficult, easy / n, difficult / n)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Three-block feature vector: sparse TF-IDF, dense embedding, dense aux."""

    tfidf: dict[int, float]
    n_tfidf: int
    embedding: np.ndarray
    aux: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "embedding", np.asarray(self.embedding, dtype=float))
        object.__setattr__(self, "aux", np.asarray(self.aux, dtype=float))
        for i in self.tfidf:
            if not 0 <= i < self.n_tfidf:
                raise ValueError(f"tfidf index {i} outside [0, {self.n_tfidf})")
        values = list(self.tfidf.values())
        if values and not np.isfinite(values).all():
            raise ValueError("non-finite tfidf weight")
        if not np.isfinite(self.embedding).all() or not np.isfinite(self.aux).all():
            raise ValueError("non-finite feature value")

    @property
    def total_dim(self) -> int:
        return self.n_tfidf + len(self.embedding) + len(self.aux)

    @property
    def block_dims(self) -> tuple[int, int, int]:
        return (self.n_tfidf, len(self.embedding), len(self.aux))

    @classmethod
    def from_dense(cls, values) -> "FeatureVector":
        """Wrap a plain dense vector (no TF-IDF or aux block)."""
        return cls(tfidf={}, n_tfidf=0, embedding=np.asarray(values, dtype=float), aux=np.zeros(0))

    def dot(self, other: "FeatureVector") -> float:
        if self.block_dims != other.block_dims:
            raise ValueError(f"dimension mismatch: {self.block_dims} vs {other.block_dims}")
        a, b = self.tfidf, other.tfidf
        if len(b) < len(a):
            a, b = b, a
        sparse = sum(v * b[i] for i, v in a.items() if i in b)
        return float(
            sparse + self.embedding @ other.embedding + self.aux @ other.aux
        )

    def squared_distance(self, other: "FeatureVector") -> float:
        if self.block_dims != other.block_dims:
            raise ValueError(f"dimension mismatch: {self.block_dims} vs {other.block_dims}")
        sparse = 0.0
        for i in self.tfidf.keys() | other.tfidf.keys():
            diff = self.tfidf.get(i, 0.0) - other.tfidf.get(i, 0.0)
            sparse += diff * diff
        de = self.embedding - other.embedding
        da = self.aux - other.aux
        return float(sparse + de @ de + da @ da)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.total_dim)
        for i, v in self.tfidf.items():
            out[i] = v
        out[self.n_tfidf : self.n_tfidf + len(self.embedding)] = self.embedding
        out[self.n_tfidf + len(self.embedding) :] = self.aux
        return out


def assemble(
    tfidf_model: TfidfModel,
    table: EmbeddingTable,
    scorers: ScorerSet,
    config: ReadabilityConfig,
    doc: CleanDocument,
) -> FeatureVector:
    """Compute all blocks for one document and concatenate them canonically."""
    tfidf = transform_tfidf(tfidf_model, doc)
    embedding = pool_embedding(table, doc)
    humor_label, humor_score = score_humor(scorers.humor, doc)
    hate_label, offensive_label = score_hate_offense(scorers.hate, scorers.offense, doc)
    s_min, s_max, s_mean, s_sum, pos_count, neg_count = wordwise_sentiment_stats(
        scorers.sentiment, doc
    )
    _, _, easy_ratio, difficult_ratio = readability_counts(config, doc)
    aux = np.array(
        [
            float(humor_label),
            humor_score,
            float(hate_label),
            float(offensive_label),
            s_min,
            s_max,
            s_mean,
            s_sum,
            float(pos_count),
            float(neg_count),
            easy_ratio,
            difficult_ratio,
        ]
    )
    return FeatureVector(
        tfidf=tfidf,
        n_tfidf=len(tfidf_model.vocabulary),
        embedding=embedding,
        aux=aux,
    )
