"""Report figures rendered to files alongside the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .corpus import LABEL_ORDER
from .evaluation import ConfusionMatrix, EvalReport
from .tuning import GridSearchReport

__all__ = ["save_cv_results_figure", "save_evaluation_figure"]


def save_cv_results_figure(rep: GridSearchReport, path: str | Path, dpi: int = 150) -> None:
    """Mean test score per combination with std error bars, best marked."""
    scores = [row.mean_test_score for row in rep.rows]
    stds = [row.std_test_score for row in rep.rows]
    labels = [
        f"{row.params.kernel} C={row.params.c:g}\n"
        f"eps={row.params.epsilon:g} g={row.params.gamma:g}"
        for row in rep.rows
    ]
    x = np.arange(len(scores))

    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(scores)), 4.5))
    ax.errorbar(x, scores, yerr=stds, fmt="o-", capsize=3, color="tab:blue")
    ax.plot(
        rep.best_index,
        scores[rep.best_index],
        marker="*",
        markersize=16,
        color="tab:red",
        linestyle="none",
        label=f"best (rank 1): combo {rep.best_index}",
    )
    ax.set_xticks(x)
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("macro F1 (CV mean)")
    ax.set_xlabel("hyperparameter combination (grid order)")
    ax.set_title(f"{rep.n_folds}-fold cross-validation scores")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def save_evaluation_figure(
    rep: EvalReport, path: str | Path, matrix: ConfusionMatrix | None = None, dpi: int = 150
) -> None:
    """Per-class metric bars, plus a confusion heatmap when a matrix is given."""
    ncols = 2 if matrix is not None else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.5 * ncols, 4.2))
    ax = axes[0] if matrix is not None else axes

    names = [label.value for label in LABEL_ORDER]
    x = np.arange(len(names))
    width = 0.25
    for offset, (attr, color) in enumerate(
        [("precision", "tab:blue"), ("recall", "tab:orange"), ("f1", "tab:green")]
    ):
        values = [getattr(rep.per_class[label], attr) for label in LABEL_ORDER]
        ax.bar(x + (offset - 1) * width, values, width, label=attr, color=color)
    ax.axhline(rep.macro_f1, color="tab:red", linestyle="--", lw=1.2,
               label=f"macro F1 = {rep.macro_f1:.3f}")
    ax.set_xticks(x)
    ax.set_xticklabels(names)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("per-class metrics")
    ax.legend(fontsize=8)

    if matrix is not None:
        ax2 = axes[1]
        counts = np.array(matrix.counts)
        im = ax2.imshow(counts, cmap="Blues")
        for i in range(3):
            for j in range(3):
                ax2.text(
                    j, i, str(counts[i, j]), ha="center", va="center",
                    color="white" if counts[i, j] > counts.max() / 2 else "black",
                    fontsize=9,
                )
        ax2.set_xticks(range(3))
        ax2.set_xticklabels(names, fontsize=8)
        ax2.set_yticks(range(3))
        ax2.set_yticklabels(names, fontsize=8)
        ax2.set_xlabel("predicted")
        ax2.set_ylabel("gold")
        ax2.set_title("confusion matrix")
        fig.colorbar(im, ax=ax2, fraction=0.046)

    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
