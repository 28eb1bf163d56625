"""Batch command-line interface.

Subcommands wire the library end to end:

    preprocess  corpus -> one cleaned document per line on stdout
    train       corpus + resources + fixed hyperparameters -> model file
    tune        corpus + resources + grid config -> CV report + best model
    predict     model + corpus -> `uid<TAB>label` predictions file
    evaluate    gold corpus + predictions -> metric table, dump, figure

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
error. Outputs are written atomically (temp file + rename); report paths
produce a .tsv/.txt and .json pair plus a .png figure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import model_io, pipeline, plots, tuning
from .corpus import SentimentLabel, class_histogram, parse_corpus, split_corpus
from .errors import ConfigError, DataError, MixsentError
from .evaluation import confusion, format_report, report, report_to_dict
from .preprocess import clean
from .svr import KERNELS, SvrHyperParams, decode_label, encode_label, fit, predict

__all__ = ["main"]


@dataclass
class RunConfig:
    """Validated paths and knobs for one command invocation."""

    corpus: Path | None = None
    embeddings: Path | None = None
    lexicon_dir: Path | None = None
    easy_words: Path | None = None
    model: Path | None = None
    grid_config: Path | None = None
    predictions: Path | None = None
    out: Path | None = None
    seed: int = 0
    folds: int = 3
    workers: int = 1
    validation_fraction: float = 0.0

    def validate(self, *, input_paths: tuple[str, ...]) -> None:
        for name in input_paths:
            path = getattr(self, name)
            if path is None:
                raise ConfigError(f"missing required --{name.replace('_', '-')}")
            if not Path(path).exists():
                raise ConfigError(f"--{name.replace('_', '-')}: no such file: {path}")
        if self.folds < 2:
            raise ConfigError(f"--folds must be at least 2, got {self.folds}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be at least 1, got {self.workers}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"--validation-fraction must be in [0, 1), got {self.validation_fraction}"
            )


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _labeled_instances(instances):
    labeled = [inst for inst in instances if inst.label is not None]
    if not labeled:
        raise DataError("corpus contains no labeled instances")
    return labeled


def _fixed_params(args) -> SvrHyperParams:
    try:
        return SvrHyperParams(
            c=args.c,
            epsilon=args.epsilon,
            gamma=args.gamma,
            kernel=args.kernel,
            tol=args.tol,
            max_iter=args.max_iter,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_preprocess(args) -> int:
    cfg = RunConfig(corpus=args.corpus)
    cfg.validate(input_paths=("corpus",))
    for inst in parse_corpus(cfg.corpus):
        sys.stdout.write(" ".join(clean(inst).words) + "\n")
    return 0


def _fit_on_corpus(args, instances, params):
    state, docs = pipeline.fit_feature_state(
        instances,
        embeddings_path=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words_path=args.easy_words,
        difficult_syllable_threshold=args.syllable_threshold,
    )
    X = [pipeline.featurize(state, doc) for doc in docs]
    y = [encode_label(inst.label) for inst in instances]
    return state, X, y


def cmd_train(args) -> int:
    cfg = RunConfig(
        corpus=args.corpus,
        embeddings=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words=args.easy_words,
        model=args.model,
        seed=args.seed,
        validation_fraction=args.validation_fraction,
    )
    cfg.validate(input_paths=("corpus", "embeddings", "lexicon_dir", "easy_words"))
    params = _fixed_params(args)

    instances = _labeled_instances(parse_corpus(cfg.corpus))
    holdout = []
    if cfg.validation_fraction > 0.0:
        split = split_corpus(instances, cfg.validation_fraction, cfg.seed)
        instances, holdout = list(split.train), list(split.validation)

    state, X, y = _fit_on_corpus(args, instances, params)
    model = fit(params, X, y)
    model_io.save_model(
        args.model, model, state.tfidf, state.fingerprints, args.syllable_threshold
    )

    histogram = class_histogram(instances)
    print(f"trained on {len(instances)} labeled instances "
          f"({', '.join(f'{k.value}={v}' for k, v in histogram.items())})")
    print(f"vocabulary: {len(state.tfidf.vocabulary)} terms; "
          f"feature dim: {X[0].total_dim if X else 0}")
    print(f"support vectors: {len(model.support_vectors)}; "
          f"iterations: {model.n_iterations}; converged: {model.converged}")
    if not model.converged:
        print("warning: solver hit the iteration cap before reaching the KKT tolerance")
    if holdout:
        gold = [inst.label for inst in holdout]
        pred = [
            decode_label(predict(model, pipeline.featurize(state, clean(inst))))
            for inst in holdout
        ]
        rep = report(confusion(gold, pred))
        print(f"held-out macro F1 over {len(holdout)} instances: {rep.macro_f1:.3f}")
    print(f"model written to {args.model}")
    return 0


def cmd_tune(args) -> int:
    cfg = RunConfig(
        corpus=args.corpus,
        embeddings=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words=args.easy_words,
        model=args.model,
        grid_config=args.grid_config,
        out=args.out,
        seed=args.seed,
        folds=args.folds,
        workers=args.workers,
    )
    required = ("corpus", "embeddings", "lexicon_dir", "easy_words")
    if args.grid_config is not None:
        required += ("grid_config",)
        config = tuning.load_grid_config(args.grid_config)
        grid = config["grid"]
        # Explicit flags win over config-file values.
        if "folds" in config and not args.folds_set:
            cfg.folds = config["folds"]
        if "seed" in config and not args.seed_set:
            cfg.seed = config["seed"]
        if "workers" in config and not args.workers_set:
            cfg.workers = config["workers"]
    else:
        grid = tuning.DEFAULT_GRID
    cfg.validate(input_paths=required)

    instances = _labeled_instances(parse_corpus(cfg.corpus))
    state, docs = pipeline.fit_feature_state(
        instances,
        embeddings_path=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words_path=args.easy_words,
        difficult_syllable_threshold=args.syllable_threshold,
    )
    X = [pipeline.featurize(state, doc) for doc in docs]
    y_labels = [inst.label for inst in instances]

    rep, model = tuning.grid_search(
        grid, X, y_labels, k=cfg.folds, seed=cfg.seed, workers=cfg.workers
    )

    out = Path(args.out)
    _atomic_write(out.with_suffix(".tsv"), tuning.report_to_tsv(rep))
    _atomic_write(
        out.with_suffix(".json"), json.dumps(tuning.report_to_dict(rep), indent=2) + "\n"
    )
    plots.save_cv_results_figure(rep, out.with_suffix(".png"))
    model_io.save_model(
        args.model, model, state.tfidf, state.fingerprints, args.syllable_threshold
    )

    best = rep.rows[rep.best_index]
    print(f"evaluated {len(rep.rows)} combinations with {cfg.folds}-fold CV "
          f"on {len(X)} instances")
    print(f"best: {tuning._params_compact(rep.best_params)} "
          f"(mean test macro F1 {best.mean_test_score:.3f})")
    print(f"report written to {out.with_suffix('.tsv')}, {out.with_suffix('.json')}, "
          f"{out.with_suffix('.png')}")
    print(f"model written to {args.model}")
    return 0


def cmd_predict(args) -> int:
    cfg = RunConfig(
        corpus=args.corpus,
        embeddings=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words=args.easy_words,
        model=args.model,
        out=args.out,
    )
    cfg.validate(input_paths=("corpus", "embeddings", "lexicon_dir", "easy_words", "model"))

    model, persisted = model_io.load_model(args.model)
    state = pipeline.bind_resources(
        tfidf=persisted.tfidf,
        fingerprints=persisted.fingerprints,
        difficult_syllable_threshold=persisted.difficult_syllable_threshold,
        embeddings_path=args.embeddings,
        lexicon_dir=args.lexicon_dir,
        easy_words_path=args.easy_words,
    )
    instances = parse_corpus(cfg.corpus)
    lines = []
    for inst in instances:
        value = predict(model, pipeline.featurize(state, clean(inst)))
        lines.append(f"{inst.uid}\t{decode_label(value).value}")
    _atomic_write(Path(args.out), "\n".join(lines) + "\n" if lines else "")
    print(f"wrote {len(lines)} predictions to {args.out}")
    return 0


def _read_predictions(path: Path) -> dict[str, SentimentLabel]:
    predictions: dict[str, SentimentLabel] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"predictions line {lineno}: expected 'uid<TAB>label'")
            uid, label_text = parts
            if uid in predictions:
                raise DataError(f"predictions line {lineno}: duplicate uid {uid!r}")
            try:
                predictions[uid] = SentimentLabel(label_text)
            except ValueError:
                raise DataError(
                    f"predictions line {lineno}: unknown label {label_text!r}"
                ) from None
    return predictions


def cmd_evaluate(args) -> int:
    cfg = RunConfig(corpus=args.corpus, predictions=args.predictions, out=args.out)
    cfg.validate(input_paths=("corpus", "predictions"))

    gold_instances = parse_corpus(cfg.corpus)
    for inst in gold_instances:
        if inst.label is None:
            raise DataError(f"gold corpus instance {inst.uid!r} has no label")
    predictions = _read_predictions(Path(args.predictions))

    gold_uids = {inst.uid for inst in gold_instances}
    for uid in predictions:
        if uid not in gold_uids:
            raise DataError(f"prediction for uid {uid!r} has no gold instance")
    gold, pred = [], []
    for inst in gold_instances:
        if inst.uid not in predictions:
            raise DataError(f"no prediction for gold uid {inst.uid!r}")
        gold.append(inst.label)
        pred.append(predictions[inst.uid])

    matrix = confusion(gold, pred)
    rep = report(matrix)
    table = format_report(rep)
    print(table)
    if args.out is not None:
        out = Path(args.out)
        _atomic_write(out.with_suffix(".txt"), table + "\n")
        _atomic_write(out.with_suffix(".json"), json.dumps(report_to_dict(rep), indent=2) + "\n")
        plots.save_evaluation_figure(rep, out.with_suffix(".png"), matrix=matrix)
        print(f"report written to {out.with_suffix('.txt')}, {out.with_suffix('.json')}, "
              f"{out.with_suffix('.png')}")
    return 0


def _add_resource_flags(sub):
    sub.add_argument("--embeddings", type=Path, required=True,
                     help="embedding file: 'word v1 ... vd' per line")
    sub.add_argument("--lexicon-dir", type=Path, required=True, dest="lexicon_dir",
                     help="directory with humor.tsv, sentiment.tsv, hate.tsv, offense.tsv")
    sub.add_argument("--easy-words", type=Path, required=True, dest="easy_words",
                     help="easy-word list, one word per line")
    sub.add_argument("--syllable-threshold", type=int, default=3, dest="syllable_threshold",
                     help="difficult-word syllable threshold (default 3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixsent",
        description="Sentiment classification for English-Hindi code-mixed tweets",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("preprocess", help="print cleaned documents, one per line")
    sub.add_argument("--corpus", type=Path, required=True)
    sub.set_defaults(handler=cmd_preprocess)

    sub = commands.add_parser("train", help="fit with fixed hyperparameters")
    sub.add_argument("--corpus", type=Path, required=True)
    _add_resource_flags(sub)
    sub.add_argument("--model", type=Path, required=True, help="output model path")
    sub.add_argument("--c", type=float, default=1.0)
    sub.add_argument("--epsilon", type=float, default=0.1)
    sub.add_argument("--gamma", type=float, default=0.1)
    sub.add_argument("--kernel", choices=KERNELS, default="rbf")
    sub.add_argument("--tol", type=float, default=0.001)
    sub.add_argument("--max-iter", type=int, default=-1, dest="max_iter")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--validation-fraction", type=float, default=0.0,
                     dest="validation_fraction",
                     help="hold out this fraction for a summary score (0 disables)")
    sub.set_defaults(handler=cmd_train)

    sub = commands.add_parser("tune", help="grid search with k-fold cross-validation")
    sub.add_argument("--corpus", type=Path, required=True)
    _add_resource_flags(sub)
    sub.add_argument("--model", type=Path, required=True, help="output path for the refit model")
    sub.add_argument("--grid-config", type=Path, default=None, dest="grid_config",
                     help="JSON grid config; built-in default grid when omitted")
    sub.add_argument("--out", type=Path, required=True,
                     help="report base path; writes <out>.tsv, <out>.json, <out>.png")
    sub.add_argument("--folds", type=int, default=3)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.set_defaults(handler=cmd_tune)

    sub = commands.add_parser("predict", help="label a corpus with a saved model")
    sub.add_argument("--corpus", type=Path, required=True)
    _add_resource_flags(sub)
    sub.add_argument("--model", type=Path, required=True, help="model file to load")
    sub.add_argument("--out", type=Path, required=True, help="predictions output path")
    sub.set_defaults(handler=cmd_predict)

    sub = commands.add_parser("evaluate", help="score predictions against a gold corpus")
    sub.add_argument("--corpus", type=Path, required=True, help="labeled gold corpus")
    sub.add_argument("--predictions", type=Path, required=True)
    sub.add_argument("--out", type=Path, default=None,
                     help="report base path; writes <out>.txt, <out>.json, <out>.png")
    sub.set_defaults(handler=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if args.command == "tune":
        given = argv if argv is not None else sys.argv[1:]
        args.folds_set = "--folds" in given
        args.seed_set = "--seed" in given
        args.workers_set = "--workers" in given
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MixsentError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - map anything else to the internal code
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
