import random

import pytest

from mixsent.corpus import CodeMixedInstance, LangTag, SentimentLabel, write_corpus

# Word pools with strong class signal through both the sentiment lexicon
# and distinct TF-IDF vocabulary.
POSITIVE_WORDS = ["love", "great", "happy", "zabardast", "badhiya", "awesome"]
NEGATIVE_WORDS = ["hate", "bad", "sad", "bakwas", "ganda", "awful"]
NEUTRAL_WORDS = ["aaj", "kal", "office", "train", "city", "mausam"]

SENTIMENT_SCORES = {
    "love": 0.9, "great": 0.8, "happy": 0.7, "zabardast": 0.9, "badhiya": 0.8,
    "awesome": 0.85,
    "hate": -0.9, "bad": -0.8, "sad": -0.7, "bakwas": -0.9, "ganda": -0.8,
    "awful": -0.85,
}

HUMOR_SCORES = {"lol": 0.9, "haha": 0.8, "funny": 0.7}
HATE_SCORES = {"hate": 0.9, "ganda": 0.6}
OFFENSE_SCORES = {"bakwas": 0.7, "awful": 0.6}

EMBEDDINGS = {
    "love": (1.0, 0.2, 0.0), "great": (0.9, 0.1, 0.0), "happy": (0.8, 0.3, 0.0),
    "zabardast": (1.0, 0.0, 0.1), "badhiya": (0.9, 0.2, 0.1), "awesome": (0.95, 0.1, 0.0),
    "hate": (-1.0, 0.2, 0.0), "bad": (-0.9, 0.1, 0.0), "sad": (-0.8, 0.3, 0.0),
    "bakwas": (-1.0, 0.0, 0.1), "ganda": (-0.9, 0.2, 0.1), "awful": (-0.95, 0.1, 0.0),
    "aaj": (0.0, 1.0, 0.0), "kal": (0.1, 0.9, 0.0), "office": (0.0, 0.8, 0.2),
    "train": (-0.1, 0.9, 0.1), "city": (0.0, 1.0, 0.2), "mausam": (0.1, 0.8, 0.0),
}

EASY_WORDS = ["aaj", "kal", "love", "bad", "sad", "hai", "the", "city"]


def write_lexicon(path, scores):
    path.write_text(
        "".join(f"{word}\t{score}\n" for word, score in sorted(scores.items())),
        encoding="utf-8",
    )


@pytest.fixture
def resources(tmp_path):
    """Embedding file, lexicon directory, and easy-word list on disk."""
    embeddings = tmp_path / "embeddings.txt"
    embeddings.write_text(
        "".join(
            f"{word} " + " ".join(str(v) for v in vec) + "\n"
            for word, vec in sorted(EMBEDDINGS.items())
        ),
        encoding="utf-8",
    )
    lexicon_dir = tmp_path / "lexicons"
    lexicon_dir.mkdir()
    write_lexicon(lexicon_dir / "humor.tsv", HUMOR_SCORES)
    write_lexicon(lexicon_dir / "sentiment.tsv", SENTIMENT_SCORES)
    write_lexicon(lexicon_dir / "hate.tsv", HATE_SCORES)
    write_lexicon(lexicon_dir / "offense.tsv", OFFENSE_SCORES)
    easy_words = tmp_path / "easy_words.txt"
    easy_words.write_text("".join(w + "\n" for w in EASY_WORDS), encoding="utf-8")
    return {
        "embeddings": embeddings,
        "lexicon_dir": lexicon_dir,
        "easy_words": easy_words,
    }


def make_instance(uid, words, label=None):
    tags = [LangTag.ENG, LangTag.HIN]
    tokens = tuple((w, tags[i % 2]) for i, w in enumerate(words))
    return CodeMixedInstance(uid=uid, tokens=tokens, label=label)


def make_separable_corpus(per_class=4, seed=3):
    """Labeled instances whose lexicon/embedding features separate cleanly."""
    rng = random.Random(seed)
    pools = [
        (SentimentLabel.NEGATIVE, NEGATIVE_WORDS),
        (SentimentLabel.NEUTRAL, NEUTRAL_WORDS),
        (SentimentLabel.POSITIVE, POSITIVE_WORDS),
    ]
    instances = []
    counter = 0
    for label, pool in pools:
        for _ in range(per_class):
            words = rng.sample(pool, 3)
            instances.append(make_instance(f"t{counter}", words, label))
            counter += 1
    rng.shuffle(instances)
    return instances


@pytest.fixture
def separable_corpus_path(tmp_path):
    path = tmp_path / "train.corpus"
    write_corpus(path, make_separable_corpus())
    return path
