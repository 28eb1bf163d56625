"""Exhaustive grid search with k-fold cross-validation, scored by macro-F1.

Folds come from a seeded Philox shuffle of the index range followed by k
contiguous test chunks, and the same folds are reused for every
hyperparameter combination. Rows keep the grid's expansion order; ranks
are competition-style (ties share the smaller rank) and the best
combination is the earliest rank-1 row, refit on all the data.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .corpus import SentimentLabel
from .errors import ConfigError, MixsentError
from .evaluation import confusion, report
from .features import FeatureVector
from .svr import KERNELS, SvrHyperParams, SvrModel, decode_label, encode_label, fit, predict

__all__ = [
    "DEFAULT_GRID",
    "ParamGrid",
    "CvRow",
    "GridSearchReport",
    "FoldError",
    "expand_grid",
    "kfold_split",
    "cross_validate",
    "grid_search",
    "load_grid_config",
    "report_to_tsv",
    "report_to_dict",
]


class FoldError(MixsentError):
    """A fit failed inside cross-validation; carries the fold index."""

    def __init__(self, fold: int, cause: Exception):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold


@dataclass(frozen=True)
class ParamGrid:
    c_values: tuple[float, ...]
    gamma_values: tuple[float, ...]
    epsilon_values: tuple[float, ...]
    kernels: tuple[str, ...] = KERNELS

    def __post_init__(self):
        if not (self.c_values and self.gamma_values and self.epsilon_values and self.kernels):
            raise ValueError("every grid value list must be nonempty")
        if any(c <= 0 for c in self.c_values):
            raise ValueError("c values must be positive")
        if any(g <= 0 for g in self.gamma_values):
            raise ValueError("gamma values must be positive")
        if any(e < 0 for e in self.epsilon_values):
            raise ValueError("epsilon values must be non-negative")
        for kernel in self.kernels:
            if kernel not in KERNELS:
                raise ValueError(f"unknown kernel {kernel!r}")


# Used when no grid configuration is supplied.
DEFAULT_GRID = ParamGrid(
    c_values=(0.1, 1.0, 10.0, 100.0),
    gamma_values=(0.01, 0.1, 1.0),
    epsilon_values=(0.05, 0.1, 0.2),
    kernels=("linear", "rbf"),
)


def expand_grid(grid: ParamGrid, **extra) -> list[SvrHyperParams]:
    """Cartesian product in (kernel, c, epsilon, gamma) order, values ascending.

    Linear-kernel combinations collapse gamma to the smallest grid value
    (inert for that kernel) so they are not duplicated. ``extra`` keyword
    arguments are passed through to every SvrHyperParams.
    """
    kernels = [k for k in KERNELS if k in grid.kernels]
    cs = sorted(grid.c_values)
    epsilons = sorted(grid.epsilon_values)
    gammas = sorted(grid.gamma_values)
    combos = []
    for kernel, c, epsilon in itertools.product(kernels, cs, epsilons):
        for gamma in gammas[:1] if kernel == "linear" else gammas:
            combos.append(
                SvrHyperParams(c=c, epsilon=epsilon, gamma=gamma, kernel=kernel, **extra)
            )
    return combos


def kfold_split(n: int, k: int, seed: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Seeded shuffle of 0..n-1, then k contiguous test chunks.

    Fold sizes differ by at most one; the first n % k folds take the
    remainder.
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} points")
    rng = np.random.Generator(np.random.Philox(seed))
    order = rng.permutation(n)
    base, remainder = divmod(n, k)
    folds = []
    start = 0
    for fold_index in range(k):
        size = base + (1 if fold_index < remainder else 0)
        test = order[start : start + size]
        train = np.concatenate([order[:start], order[start + size :]])
        folds.append((tuple(int(i) for i in train), tuple(int(i) for i in test)))
        start += size
    return folds


@dataclass(frozen=True)
class CvRow:
    params: SvrHyperParams
    mean_fit_time: float
    std_fit_time: float
    mean_score_time: float
    std_score_time: float
    split_test_scores: tuple[float, ...]
    split_train_scores: tuple[float, ...]
    mean_test_score: float
    std_test_score: float
    mean_train_score: float
    std_train_score: float
    rank_test_score: int = 1
    failed: bool = False


@dataclass(frozen=True)
class GridSearchReport:
    rows: tuple[CvRow, ...]
    best_params: SvrHyperParams
    best_index: int
    n_folds: int
    seed: int


def _macro_f1(gold: list[SentimentLabel], pred: list[SentimentLabel]) -> float:
    return report(confusion(gold, pred)).macro_f1


def _run_fold(combo, X, y_labels, train_idx, test_idx, fold_index):
    x_train = [X[i] for i in train_idx]
    y_train = [encode_label(y_labels[i]) for i in train_idx]
    t0 = time.perf_counter()
    try:
        model = fit(combo, x_train, y_train)
    except Exception as exc:
        raise FoldError(fold_index, exc) from exc
    fit_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    pred_test = [decode_label(predict(model, X[i])) for i in test_idx]
    test_score = _macro_f1([y_labels[i] for i in test_idx], pred_test)
    score_time = time.perf_counter() - t0

    pred_train = [decode_label(predict(model, X[i])) for i in train_idx]
    train_score = _macro_f1([y_labels[i] for i in train_idx], pred_train)
    return fit_time, score_time, test_score, train_score


def _row_from_folds(combo, outcomes) -> CvRow:
    fit_times = np.array([o[0] for o in outcomes])
    score_times = np.array([o[1] for o in outcomes])
    test_scores = tuple(o[2] for o in outcomes)
    train_scores = tuple(o[3] for o in outcomes)
    return CvRow(
        params=combo,
        mean_fit_time=float(fit_times.mean()),
        std_fit_time=float(fit_times.std()),
        mean_score_time=float(score_times.mean()),
        std_score_time=float(score_times.std()),
        split_test_scores=test_scores,
        split_train_scores=train_scores,
        mean_test_score=float(np.mean(test_scores)),
        std_test_score=float(np.std(test_scores)),
        mean_train_score=float(np.mean(train_scores)),
        std_train_score=float(np.std(train_scores)),
    )


def cross_validate(
    combo: SvrHyperParams,
    X: list[FeatureVector],
    y_labels: list[SentimentLabel],
    k: int,
    seed: int,
) -> CvRow:
    """Score one combination over seeded k-fold splits.

    Test and train macro-F1 are recorded per fold; means and standard
    deviations are population statistics over the k folds. Fit errors
    propagate as FoldError.
    """
    if len(X) != len(y_labels):
        raise ValueError("X and y_labels lengths differ")
    folds = kfold_split(len(X), k, seed)
    outcomes = [
        _run_fold(combo, X, y_labels, train_idx, test_idx, fi)
        for fi, (train_idx, test_idx) in enumerate(folds)
    ]
    return _row_from_folds(combo, outcomes)


def _assign_ranks(rows: list[CvRow]) -> list[CvRow]:
    order = sorted(range(len(rows)), key=lambda i: (-rows[i].mean_test_score, i))
    ranked = list(rows)
    for pos, idx in enumerate(order):
        if pos > 0 and rows[idx].mean_test_score == rows[order[pos - 1]].mean_test_score:
            rank = ranked[order[pos - 1]].rank_test_score
        else:
            rank = pos + 1
        ranked[idx] = replace(rows[idx], rank_test_score=rank)
    return ranked


def grid_search(
    grid: ParamGrid,
    X: list[FeatureVector],
    y_labels: list[SentimentLabel],
    k: int,
    seed: int,
    workers: int = 1,
    **extra,
) -> tuple[GridSearchReport, SvrModel]:
    """Evaluate every combination, rank them, and refit the best on all data.

    (combo, fold) tasks run on up to ``workers`` threads; results are
    assembled in deterministic (grid index, fold index) order, so the
    report is identical to a sequential run except for the timing fields.
    A combination whose every fold fails is scored 0 and flagged; a
    partial failure propagates the first FoldError.
    """
    combos = expand_grid(grid, **extra)
    if len(X) != len(y_labels):
        raise ValueError("X and y_labels lengths differ")
    folds = kfold_split(len(X), k, seed)

    tasks = [(ci, fi) for ci in range(len(combos)) for fi in range(k)]

    def run(task):
        ci, fi = task
        train_idx, test_idx = folds[fi]
        try:
            return _run_fold(combos[ci], X, y_labels, train_idx, test_idx, fi)
        except FoldError as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    rows = []
    for ci, combo in enumerate(combos):
        outcomes = results[ci * k : (ci + 1) * k]
        failures = [o for o in outcomes if isinstance(o, FoldError)]
        if failures:
            if len(failures) < k:
                raise failures[0]
            zeros = (0.0,) * k
            rows.append(
                CvRow(
                    params=combo,
                    mean_fit_time=0.0,
                    std_fit_time=0.0,
                    mean_score_time=0.0,
                    std_score_time=0.0,
                    split_test_scores=zeros,
                    split_train_scores=zeros,
                    mean_test_score=0.0,
                    std_test_score=0.0,
                    mean_train_score=0.0,
                    std_train_score=0.0,
                    failed=True,
                )
            )
        else:
            rows.append(_row_from_folds(combo, outcomes))

    ranked = _assign_ranks(rows)
    best_index = max(range(len(ranked)), key=lambda i: (ranked[i].mean_test_score, -i))
    best_params = combos[best_index]
    best_model = fit(best_params, X, [encode_label(label) for label in y_labels])
    report_ = GridSearchReport(
        rows=tuple(ranked),
        best_params=best_params,
        best_index=best_index,
        n_folds=k,
        seed=seed,
    )
    return report_, best_model


def _params_compact(p: SvrHyperParams) -> str:
    return f"C={p.c:g};epsilon={p.epsilon:g};gamma={p.gamma:g};kernel={p.kernel}"


def report_columns(k: int) -> list[str]:
    cols = ["param_C", "param_epsilon", "param_gamma", "param_kernel", "params"]
    cols += ["mean_fit_time", "std_fit_time", "mean_score_time", "std_score_time"]
    cols += [f"split{i}_test_score" for i in range(k)]
    cols += [f"split{i}_train_score" for i in range(k)]
    cols += ["mean_test_score", "std_test_score", "mean_train_score", "std_train_score"]
    cols += ["rank_test_score"]
    return cols


def report_to_tsv(rep: GridSearchReport) -> str:
    """One row per combination, tab-separated, fixed column order."""
    lines = ["\t".join(report_columns(rep.n_folds))]
    for row in rep.rows:
        p = row.params
        fields = [f"{p.c:g}", f"{p.epsilon:g}", f"{p.gamma:g}", p.kernel, _params_compact(p)]
        fields += [
            f"{row.mean_fit_time:.6f}",
            f"{row.std_fit_time:.6f}",
            f"{row.mean_score_time:.6f}",
            f"{row.std_score_time:.6f}",
        ]
        fields += [f"{s:.6f}" for s in row.split_test_scores]
        fields += [f"{s:.6f}" for s in row.split_train_scores]
        fields += [
            f"{row.mean_test_score:.6f}",
            f"{row.std_test_score:.6f}",
            f"{row.mean_train_score:.6f}",
            f"{row.std_train_score:.6f}",
        ]
        fields += [str(row.rank_test_score)]
        lines.append("\t".join(fields))
    return "\n".join(lines) + "\n"


def report_to_dict(rep: GridSearchReport) -> dict:
    def row_dict(row: CvRow) -> dict:
        return {
            "param_C": row.params.c,
            "param_epsilon": row.params.epsilon,
            "param_gamma": row.params.gamma,
            "param_kernel": row.params.kernel,
            "params": _params_compact(row.params),
            "mean_fit_time": row.mean_fit_time,
            "std_fit_time": row.std_fit_time,
            "mean_score_time": row.mean_score_time,
            "std_score_time": row.std_score_time,
            "split_test_scores": list(row.split_test_scores),
            "split_train_scores": list(row.split_train_scores),
            "mean_test_score": row.mean_test_score,
            "std_test_score": row.std_test_score,
            "mean_train_score": row.mean_train_score,
            "std_train_score": row.std_train_score,
            "rank_test_score": row.rank_test_score,
            "failed": row.failed,
        }

    return {
        "n_folds": rep.n_folds,
        "seed": rep.seed,
        "best_index": rep.best_index,
        "best_params": _params_compact(rep.best_params),
        "rows": [row_dict(row) for row in rep.rows],
    }


def load_grid_config(path: str | Path) -> dict:
    """Read a JSON grid configuration.

    Recognized keys: c, gamma, epsilon (lists of numbers), kernels (list
    of kernel names), folds, seed, workers (integers). Returns a dict with
    a ParamGrid under "grid" plus whichever of folds/seed/workers were
    present.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"grid config {path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"grid config {path}: expected a JSON object")

    known = {"c", "gamma", "epsilon", "kernels", "folds", "seed", "workers"}
    for key in raw:
        if key not in known:
            raise ConfigError(f"grid config {path}: unknown field {key!r}")

    def number_list(key):
        value = raw.get(key)
        if value is None:
            raise ConfigError(f"grid config {path}: missing field {key!r}")
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"grid config {path}: field {key!r} must be a list of numbers")
        return tuple(float(v) for v in value)

    kernels = raw.get("kernels", list(KERNELS))
    if not isinstance(kernels, list) or not all(isinstance(v, str) for v in kernels):
        raise ConfigError(f"grid config {path}: field 'kernels' must be a list of names")
    try:
        grid = ParamGrid(
            c_values=number_list("c"),
            gamma_values=number_list("gamma"),
            epsilon_values=number_list("epsilon"),
            kernels=tuple(kernels),
        )
    except ValueError as exc:
        raise ConfigError(f"grid config {path}: {exc}") from None

    out = {"grid": grid}
    for key in ("folds", "seed", "workers"):
        if key in raw:
            value = raw[key]
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"grid config {path}: field {key!r} must be an integer")
            out[key] = value
    return out
