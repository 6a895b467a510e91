"""Confusion matrices, classification metrics and cross-fold aggregation.

Per-class precision, recall and F1 are one-vs-rest and define 0/0 as 0.
Precision, recall and F1 are averaged over classes weighted by true-class
support, so weighted recall always equals accuracy. MCC uses the
correlation form of the full confusion matrix, which equals the usual
TP/TN/FP/FN formula when there are two classes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyInputError, EmptyMatrixError, LengthMismatchError, UnknownClassError

METRICS = ("accuracy", "precision", "recall", "f1", "mcc")

TABLE_HEADER = ("Model", "Mean Accuracy (%)", "Mean Precision (%)", "Mean Recall (%)",
                "Mean F1-Score (%)", "Mean MCC")


@dataclass(frozen=True)
class ConfusionMatrix:
    """``counts[t, p]`` is the number of rows of true class ``t`` predicted as ``p``."""

    counts: np.ndarray
    classes: tuple[str, ...]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_matrix(truth: Sequence, pred: Sequence, classes: Sequence) -> ConfusionMatrix:
    truth, pred = list(truth), list(pred)
    if len(truth) != len(pred):
        raise LengthMismatchError(f"{len(truth)} true labels vs {len(pred)} predictions")
    classes = tuple(str(c.value if hasattr(c, "value") else c) for c in classes)
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(truth, pred):
        t = t.value if hasattr(t, "value") else t
        p = p.value if hasattr(p, "value") else p
        try:
            cm[index[str(t)], index[str(p)]] += 1
        except KeyError as exc:
            raise UnknownClassError(f"label {exc.args[0]!r} not in class list {classes}") from None
    return ConfusionMatrix(cm, classes)


def _ratio(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def binary_mcc(tp: float, tn: float, fp: float, fn: float) -> float:
    """MCC from the four binary counts; 0 when the denominator vanishes."""
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if den == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(den)


def multiclass_mcc(counts: np.ndarray) -> float:
    C = np.asarray(counts, dtype=np.float64)
    s = C.sum()
    correct = np.trace(C)
    t = C.sum(axis=1)
    p = C.sum(axis=0)
    num = correct * s - float(t @ p)
    den = math.sqrt(s * s - float(p @ p)) * math.sqrt(s * s - float(t @ t))
    if den == 0:
        return 0.0
    return num / den


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float
    per_class: dict[str, dict] = field(default_factory=dict)
    support: int = 0
    averaging: str = "weighted"

    def scalars(self) -> dict[str, float]:
        return {k: getattr(self, k) for k in METRICS}

    def to_dict(self) -> dict:
        return {**self.scalars(), "support": self.support, "averaging": self.averaging,
                "per_class": self.per_class}


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    C = cm.counts.astype(np.float64)
    total = C.sum()
    if total == 0:
        raise EmptyMatrixError("confusion matrix has no entries")
    tp = np.diag(C)
    support = C.sum(axis=1)
    predicted = C.sum(axis=0)
    per_class = {}
    wp = wr = wf = 0.0
    for i, cls in enumerate(cm.classes):
        fp = predicted[i] - tp[i]
        fn = support[i] - tp[i]
        prec, p_undef = _ratio(tp[i], tp[i] + fp)
        rec, r_undef = _ratio(tp[i], tp[i] + fn)
        f1, f_undef = _ratio(2 * tp[i], 2 * tp[i] + fp + fn)
        per_class[cls] = {"precision": float(prec), "recall": float(rec), "f1": float(f1), "support": int(support[i]),
                          "undefined": [name for name, u in
                                        (("precision", p_undef), ("recall", r_undef), ("f1", f_undef)) if u]}
        w = support[i] / total
        wp += w * prec
        wr += w * rec
        wf += w * f1
    accuracy = float(tp.sum() / total)
    if len(cm.classes) == 2:
        # class 0 as positive; MCC is symmetric in the choice
        mcc = binary_mcc(C[0, 0], C[1, 1], C[1, 0], C[0, 1])
    else:
        mcc = multiclass_mcc(C)
    return MetricsReport(accuracy, float(wp), float(wr), float(wf), float(mcc), per_class, int(total))


@dataclass
class AggregateReport:
    mean: dict[str, float]
    std: dict[str, float]
    n_folds: int

    def to_dict(self) -> dict:
        return {"mean": dict(self.mean), "std": dict(self.std), "n_folds": self.n_folds}

    def table_cells(self) -> list[str]:
        cells = [f"{100 * self.mean[k]:.2f} ± {100 * self.std[k]:.2f}" for k in METRICS[:4]]
        cells.append(f"{self.mean['mcc']:.4f} ± {self.std['mcc']:.4f}")
        return cells


def aggregate(fold_reports: Sequence[MetricsReport]) -> AggregateReport:
    """Mean and sample (n - 1) standard deviation of each scalar metric."""
    if not fold_reports:
        raise EmptyInputError("no fold reports to aggregate")
    mean, std = {}, {}
    for k in METRICS:
        vals = np.array([getattr(r, k) for r in fold_reports], dtype=np.float64)
        mean[k] = float(vals.mean())
        std[k] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return AggregateReport(mean, std, len(fold_reports))


def format_table(rows: Sequence[tuple[str, AggregateReport]]) -> str:
    """Aligned plain-text table: model, then mean ± std per metric."""
    body = [list(TABLE_HEADER)] + [[name] + agg.table_cells() for name, agg in rows]
    widths = [max(len(r[i]) for r in body) for i in range(len(TABLE_HEADER))]
    lines = []
    for j, r in enumerate(body):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))))
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def report_json(report: MetricsReport | AggregateReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True)
