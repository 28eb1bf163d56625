"""Fitted feature state: everything needed to turn an instance into a vector.

The state bundles the TF-IDF model fitted on the training corpus with the
external resources (embedding table, the four lexicons, the easy-word
list) and a fingerprint of each resource file. Persisted models store the
TF-IDF state and the fingerprints; at predict time the resources are
reloaded from disk and refused if their fingerprints no longer match.

Lexicon directory layout: humor.tsv, sentiment.tsv, hate.tsv, offense.tsv
(each `word<TAB>score` per line).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .corpus import CodeMixedInstance
from .errors import DataError, FingerprintMismatchError
from .features import (
    Aggregation,
    EmbeddingTable,
    FeatureVector,
    ReadabilityConfig,
    ScorerSet,
    TfidfModel,
    assemble,
    fit_tfidf,
    load_embeddings,
    load_lexicon,
    load_word_list,
)
from .preprocess import CleanDocument, clean

__all__ = [
    "LEXICON_FILES",
    "ResourceFingerprint",
    "FeatureState",
    "fingerprint_file",
    "load_scorer_set",
    "fit_feature_state",
    "bind_resources",
    "featurize",
    "featurize_corpus",
]

LEXICON_FILES = {
    "humor": ("humor.tsv", Aggregation.BINARY_LABEL_AND_SCORE),
    "sentiment": ("sentiment.tsv", Aggregation.PER_WORD_STATS),
    "hate": ("hate.tsv", Aggregation.BINARY_LABEL_AND_SCORE),
    "offense": ("offense.tsv", Aggregation.BINARY_LABEL_AND_SCORE),
}


@dataclass(frozen=True)
class ResourceFingerprint:
    name: str
    size: int
    sha256: str


def fingerprint_file(path: str | Path, name: str) -> ResourceFingerprint:
    data = Path(path).read_bytes()
    return ResourceFingerprint(name=name, size=len(data), sha256=hashlib.sha256(data).hexdigest())


@dataclass(frozen=True)
class FeatureState:
    tfidf: TfidfModel
    embeddings: EmbeddingTable
    scorers: ScorerSet
    readability: ReadabilityConfig
    fingerprints: tuple[ResourceFingerprint, ...]


def load_scorer_set(lexicon_dir: str | Path) -> ScorerSet:
    lexicon_dir = Path(lexicon_dir)
    loaded = {}
    for name, (filename, aggregation) in LEXICON_FILES.items():
        path = lexicon_dir / filename
        if not path.is_file():
            raise DataError(f"missing lexicon file {path}")
        loaded[name] = load_lexicon(path, name=name, aggregation=aggregation)
    return ScorerSet(**loaded)


def _resource_fingerprints(
    embeddings_path: Path, lexicon_dir: Path, easy_words_path: Path
) -> tuple[ResourceFingerprint, ...]:
    prints = [fingerprint_file(embeddings_path, "embeddings")]
    for name, (filename, _) in sorted(LEXICON_FILES.items()):
        prints.append(fingerprint_file(lexicon_dir / filename, f"lexicon:{name}"))
    prints.append(fingerprint_file(easy_words_path, "easy_words"))
    return tuple(prints)


def fit_feature_state(
    corpus: list[CodeMixedInstance],
    embeddings_path: str | Path,
    lexicon_dir: str | Path,
    easy_words_path: str | Path,
    difficult_syllable_threshold: int = 3,
) -> tuple[FeatureState, list[CleanDocument]]:
    """Clean the corpus, fit TF-IDF on it, and load all scoring resources."""
    embeddings_path = Path(embeddings_path)
    lexicon_dir = Path(lexicon_dir)
    easy_words_path = Path(easy_words_path)
    docs = [clean(inst) for inst in corpus]
    state = FeatureState(
        tfidf=fit_tfidf(docs),
        embeddings=load_embeddings(embeddings_path),
        scorers=load_scorer_set(lexicon_dir),
        readability=ReadabilityConfig(
            easy_words=load_word_list(easy_words_path),
            difficult_syllable_threshold=difficult_syllable_threshold,
        ),
        fingerprints=_resource_fingerprints(embeddings_path, lexicon_dir, easy_words_path),
    )
    return state, docs


def bind_resources(
    tfidf: TfidfModel,
    fingerprints: tuple[ResourceFingerprint, ...],
    difficult_syllable_threshold: int,
    embeddings_path: str | Path,
    lexicon_dir: str | Path,
    easy_words_path: str | Path,
) -> FeatureState:
    """Rebuild a FeatureState for a persisted model, verifying fingerprints."""
    embeddings_path = Path(embeddings_path)
    lexicon_dir = Path(lexicon_dir)
    easy_words_path = Path(easy_words_path)
    current = _resource_fingerprints(embeddings_path, lexicon_dir, easy_words_path)
    expected = {fp.name: fp for fp in fingerprints}
    for fp in current:
        want = expected.get(fp.name)
        if want is None:
            raise FingerprintMismatchError(f"model has no fingerprint for resource {fp.name!r}")
        if fp != want:
            raise FingerprintMismatchError(
                f"resource {fp.name!r} differs from the file used at fit time "
                f"(size {fp.size} vs {want.size}, sha256 {fp.sha256[:12]}... vs {want.sha256[:12]}...)"
            )
    return FeatureState(
        tfidf=tfidf,
        embeddings=load_embeddings(embeddings_path),
        scorers=load_scorer_set(lexicon_dir),
        readability=ReadabilityConfig(
            easy_words=load_word_list(easy_words_path),
            difficult_syllable_threshold=difficult_syllable_threshold,
        ),
        fingerprints=fingerprints,
    )


def featurize(state: FeatureState, doc: CleanDocument) -> FeatureVector:
    return assemble(state.tfidf, state.embeddings, state.scorers, state.readability, doc)


def featurize_corpus(
    state: FeatureState, corpus: list[CodeMixedInstance]
) -> list[FeatureVector]:
    return [featurize(state, clean(inst)) for inst in corpus]
