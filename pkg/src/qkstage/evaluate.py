"""Confusion matrices and per-class classification metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K) int64, rows = true class, columns = predicted
    class_names: list[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.class_names)
        if self.counts.shape != (k, k):
            raise ValueError(f"counts must be {k}x{k} for {k} class names")
        if (self.counts < 0).any():
            raise ValueError("negative count")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(true_labels, predicted_labels, class_names: list[str]) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape or t.ndim != 1:
        raise ValueError("true and predicted labels must be equal-length vectors")
    k = len(class_names)
    if t.size and (min(t.min(), p.min()) < 0 or max(t.max(), p.max()) >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    counts = np.bincount(t * k + p, minlength=k * k).reshape(k, k)
    return ConfusionMatrix(counts=counts, class_names=list(class_names))


def _round_half_up(x, decimals=1):
    scale = 10.0**decimals
    return np.floor(np.asarray(x) * scale + 0.5) / scale


def row_percent(cm: ConfusionMatrix) -> np.ndarray:
    """Row-normalized counts as percentages, rounded half-up to one decimal.
    Rows for absent classes come out all zero."""
    counts = cm.counts.astype(np.float64)
    sums = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        pct = np.where(sums > 0, 100.0 * counts / np.where(sums > 0, sums, 1.0), 0.0)
    return _round_half_up(pct)


def metrics(cm: ConfusionMatrix) -> dict:
    """Accuracy, per-class precision/recall/F1 and macro-F1.

    A precision (recall) with an empty column (row) is undefined: it is
    reported as None with its `defined` flag false rather than as 0, and
    macro-F1 averages only the classes whose F1 is defined.
    """
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    counts = cm.counts.astype(np.float64)
    col_sums = counts.sum(axis=0)
    row_sums = counts.sum(axis=1)
    diag = np.diag(counts)

    per_class = []
    f1_values = []
    for c, name in enumerate(cm.class_names):
        precision = float(diag[c] / col_sums[c]) if col_sums[c] > 0 else None
        recall = float(diag[c] / row_sums[c]) if row_sums[c] > 0 else None
        if precision is None or recall is None:
            f1 = None
        elif precision + recall == 0.0:
            f1 = 0.0
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        if f1 is not None:
            f1_values.append(f1)
        per_class.append(
            {
                "class": name,
                "precision": precision,
                "precision_defined": precision is not None,
                "recall": recall,
                "recall_defined": recall is not None,
                "f1": f1,
                "f1_defined": f1 is not None,
                "support": int(row_sums[c]),
            }
        )

    return {
        "total": cm.total,
        "accuracy": float(diag.sum() / cm.total),
        "per_class": per_class,
        "macro_f1": float(np.mean(f1_values)) if f1_values else None,
    }


def pairwise_confusion_rate(cm: ConfusionMatrix, class_a: int, class_b: int) -> float:
    """Fraction of the two classes' samples landing in each other's column:
    (counts[a][b] + counts[b][a]) / (row_sum(a) + row_sum(b))."""
    if class_a == class_b:
        raise ValueError("classes must be distinct")
    k = len(cm.class_names)
    if not (0 <= class_a < k and 0 <= class_b < k):
        raise ValueError(f"class indices must lie in [0, {k})")
    denom = cm.counts[class_a].sum() + cm.counts[class_b].sum()
    if denom == 0:
        raise ValueError(f"classes {class_a} and {class_b} have no samples")
    return float((cm.counts[class_a, class_b] + cm.counts[class_b, class_a]) / denom)


def report_metrics(cm: ConfusionMatrix) -> dict:
    """metrics() plus every pairwise confusion rate, in report-ready form.
    Pairs where both classes are absent get a null rate instead of an error."""
    out = metrics(cm)
    out["evaluation"] = "held-out"
    rates = []
    k = len(cm.class_names)
    for a in range(k):
        for b in range(a + 1, k):
            try:
                rate = pairwise_confusion_rate(cm, a, b)
            except ValueError:
                rate = None
            rates.append(
                {"classes": [cm.class_names[a], cm.class_names[b]], "rate": rate}
            )
    out["pairwise_confusion_rates"] = rates
    return out
