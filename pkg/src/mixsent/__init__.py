"""Sentiment classification toolkit for English-Hindi code-mixed tweets.

Pipeline: annotated corpus ingestion -> tweet normalization -> TF-IDF,
pooled-embedding and lexicon/readability features -> epsilon-SVR trained
by an SMO dual solver, tuned by grid-search cross-validation -> per-class
and macro precision/recall/F1 reports.
"""

from .corpus import (
    CodeMixedInstance,
    CorpusSplit,
    LangTag,
    SentimentLabel,
    class_histogram,
    format_corpus,
    parse_corpus,
    split_corpus,
)
from .evaluation import ConfusionMatrix, EvalReport, confusion, format_report, report
from .features import (
    EmbeddingTable,
    FeatureVector,
    LexiconScorer,
    ReadabilityConfig,
    ScorerSet,
    TfidfModel,
    assemble,
    fit_tfidf,
    load_embeddings,
    pool_embedding,
    transform_tfidf,
)
from .model_io import load_model, save_model
from .preprocess import CleanDocument, clean
from .svr import (
    SvrHyperParams,
    SvrModel,
    decode_label,
    encode_label,
    fit,
    kernel_eval,
    predict,
)
from .tuning import (
    CvRow,
    GridSearchReport,
    ParamGrid,
    cross_validate,
    expand_grid,
    grid_search,
    kfold_split,
)

__version__ = "0.1.0"
