"""Per-class precision/recall/F1/support and macro averages.

Zero-division convention: a class with an empty prediction column or an
empty gold row scores 0 for the undefined metric and is recorded in the
report's zero_division_classes, so degenerate predictors score poorly
instead of crashing. Macro values are unweighted means over the three
classes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import LABEL_ORDER, SentimentLabel

__all__ = [
    "ConfusionMatrix",
    "ClassMetrics",
    "EvalReport",
    "confusion",
    "f1_score",
    "report",
    "report_from_precision_recall",
    "format_report",
    "report_to_dict",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts indexed (gold, predicted) in label order neg/neu/pos."""

    counts: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.counts) != 3 or any(len(row) != 3 for row in self.counts):
            raise ValueError("confusion matrix must be 3x3")
        if any(v < 0 for row in self.counts for v in row):
            raise ValueError("confusion matrix entries must be non-negative")

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: dict[SentimentLabel, ClassMetrics]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    total_support: int
    zero_division_classes: tuple[SentimentLabel, ...] = ()


def confusion(gold, pred) -> ConfusionMatrix:
    gold = list(gold)
    pred = list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"gold and pred lengths differ: {len(gold)} vs {len(pred)}")
    if not gold:
        raise ValueError("need at least one (gold, pred) pair")
    index = {label: i for i, label in enumerate(LABEL_ORDER)}
    counts = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for g, p in zip(gold, pred):
        counts[index[g]][index[p]] += 1
    return ConfusionMatrix(counts=tuple(tuple(row) for row in counts))


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean 2PR/(P+R); 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def report(matrix: ConfusionMatrix) -> EvalReport:
    if matrix.total < 1:
        raise ValueError("confusion matrix is empty")
    per_class = {}
    zero_division = []
    for i, label in enumerate(LABEL_ORDER):
        tp = matrix.counts[i][i]
        col = sum(matrix.counts[g][i] for g in range(3))
        row = sum(matrix.counts[i])
        if col == 0 or row == 0:
            zero_division.append(label)
        precision = tp / col if col else 0.0
        recall = tp / row if row else 0.0
        per_class[label] = ClassMetrics(
            precision=precision, recall=recall, f1=f1_score(precision, recall), support=row
        )
    metrics = [per_class[label] for label in LABEL_ORDER]
    return EvalReport(
        per_class=per_class,
        macro_precision=sum(m.precision for m in metrics) / 3.0,
        macro_recall=sum(m.recall for m in metrics) / 3.0,
        macro_f1=sum(m.f1 for m in metrics) / 3.0,
        total_support=matrix.total,
        zero_division_classes=tuple(zero_division),
    )


def report_from_precision_recall(
    precision_recall: dict[SentimentLabel, tuple[float, float]],
    supports: dict[SentimentLabel, int],
) -> EvalReport:
    """Build a report straight from per-class (P, R) pairs and supports."""
    per_class = {}
    for label in LABEL_ORDER:
        p, r = precision_recall[label]
        per_class[label] = ClassMetrics(
            precision=p, recall=r, f1=f1_score(p, r), support=supports[label]
        )
    metrics = [per_class[label] for label in LABEL_ORDER]
    return EvalReport(
        per_class=per_class,
        macro_precision=sum(m.precision for m in metrics) / 3.0,
        macro_recall=sum(m.recall for m in metrics) / 3.0,
        macro_f1=sum(m.f1 for m in metrics) / 3.0,
        total_support=sum(m.support for m in metrics),
    )


def format_report(rep: EvalReport) -> str:
    """Text table: class rows then the macro row; macro F1 to 3 decimals."""
    header = f"{'Class':<12}{'Precision':>10}{'Recall':>8}{'F1-score':>10}{'Support':>9}"
    lines = [header]
    for label in LABEL_ORDER:
        m = rep.per_class[label]
        lines.append(
            f"{label.value:<12}{m.precision:>10.2f}{m.recall:>8.2f}{m.f1:>10.2f}{m.support:>9d}"
        )
    lines.append(
        f"{'Macro avg.':<12}{rep.macro_precision:>10.2f}{rep.macro_recall:>8.2f}"
        f"{rep.macro_f1:>10.3f}{rep.total_support:>9d}"
    )
    return "\n".join(lines)


def report_to_dict(rep: EvalReport) -> dict:
    """Machine-readable form of a report, for the structured dump."""
    return {
        "per_class": {
            label.value: {
                "precision": rep.per_class[label].precision,
                "recall": rep.per_class[label].recall,
                "f1": rep.per_class[label].f1,
                "support": rep.per_class[label].support,
            }
            for label in LABEL_ORDER
        },
        "macro_precision": rep.macro_precision,
        "macro_recall": rep.macro_recall,
        "macro_f1": rep.macro_f1,
        "total_support": rep.total_support,
        "zero_division_classes": [label.value for label in rep.zero_division_classes],
    }
