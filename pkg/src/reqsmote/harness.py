"""Leakage-safe stratified K-fold experiments.

For every fold the vectorizer is fitted on the K - 1 training folds only, the
training rows alone are resampled, and the validation rows are transformed
with the training vocabulary and never resampled.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import models as _models
from . import vectorizer as _vec
from .corpus import Dataset
from .errors import ClassTooSmallError, FoldError, ReqSmoteError
from .evaluation import METRICS, AggregateReport, MetricsReport, aggregate, confusion_matrix, metrics
from .models import ModelSpec, TrainedModel
from .resampler import ResampleReport, SmoteParams, smote_only, smote_tomek
from .vectorizer import FeatureMatrix, TfidfConfig, Vocabulary

log = logging.getLogger(__name__)

REPORT_VERSION = 1
RESAMPLE_MODES = ("none", "smote", "smote_tomek")


@dataclass(frozen=True)
class CvPlan:
    k: int
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def train_indices(self, i: int) -> np.ndarray:
        return np.sort(np.concatenate([self.folds[j] for j in range(self.k) if j != i]).astype(np.int64))

    def val_indices(self, i: int) -> np.ndarray:
        return np.sort(np.asarray(self.folds[i], dtype=np.int64))


def _fold_counts(counts: np.ndarray, k: int) -> np.ndarray | None:
    """Rows of each class per fold, or None if the greedy placement gets stuck.

    Every class puts ``count // k`` rows in each fold. The ``count % k``
    leftovers are placed so that each fold's share of a class stays within
    one row of the global share. Classes whose placement is forced go first,
    then leftovers go to the folds with the most room left.
    """
    n = int(counts.sum())
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    q, r = counts // k, counts % k
    room = sizes - q.sum()
    share = counts[:, None] * sizes[None, :] / n
    hi_ok = np.abs(q[:, None] + 1 - share) <= 1 + 1e-12
    lo_ok = np.abs(q[:, None] - share) <= 1 + 1e-12
    out = np.repeat(q[:, None], k, axis=1)
    order = sorted(range(len(counts)), key=lambda c: (-(~lo_ok[c]).sum(), -(~hi_ok[c]).sum(), c))
    for c in order:
        forced = np.flatnonzero(~lo_ok[c])
        free = [f for f in range(k) if hi_ok[c, f] and lo_ok[c, f]]
        free.sort(key=lambda f: (-room[f], f))
        chosen = list(forced) + free[: r[c] - len(forced)]
        if len(chosen) != r[c]:
            return None
        out[c, chosen] += 1
        room[chosen] -= 1
    return out if not room.any() else None


def stratified_kfold(labels: Sequence, k: int = 10, seed: int = 42) -> CvPlan:
    """Shuffle each class's indices with ``seed`` and deal them to ``k`` folds.

    Each class contributes ``count // k`` rows to every fold; its leftover
    rows go where they keep every fold's class share within one row of the
    global share. Classes are processed in sorted label order.
    """
    if k < 2:
        raise ValueError("K must be >= 2")
    labels = [getattr(x, "value", x) for x in labels]
    counts = Counter(labels)
    classes = sorted(counts)
    for cls in classes:
        if counts[cls] < k:
            raise ClassTooSmallError(cls, counts[cls], k)
    rng = np.random.default_rng(seed)
    per_fold = _fold_counts(np.array([counts[c] for c in classes]), k)
    folds: list[list[int]] = [[] for _ in range(k)]
    arr = np.asarray(labels, dtype=object)
    nxt = 0
    for ci, cls in enumerate(classes):
        idx = np.flatnonzero(arr == cls)
        rng.shuffle(idx)
        if per_fold is None:
            # plain round-robin, continuing from the last fold used
            for i in idx:
                folds[nxt].append(int(i))
                nxt = (nxt + 1) % k
            continue
        start = 0
        for f in range(k):
            folds[f].extend(int(i) for i in idx[start:start + per_fold[ci, f]])
            start += per_fold[ci, f]
    if per_fold is None:
        log.warning("fold placement fell back to round-robin; class shares may drift")
    return CvPlan(k, tuple(tuple(sorted(f)) for f in folds), seed)


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple[ModelSpec, ...]
    resample: str = "smote_tomek"
    k: int = 10
    seed: int = 42
    tfidf: TfidfConfig = field(default_factory=TfidfConfig)
    smote: SmoteParams = field(default_factory=SmoteParams)

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if self.k < 2:
            raise ValueError("K must be >= 2")
        if not self.models:
            raise ValueError("at least one model is required")
        if self.resample not in RESAMPLE_MODES:
            raise ValueError(f"resample must be one of {RESAMPLE_MODES}")

    def to_dict(self) -> dict:
        return {
            "models": [s.to_dict() for s in self.models],
            "resample": self.resample,
            "k": self.k,
            "seed": self.seed,
            "tfidf": self.tfidf.to_dict(),
            "smote": {"k_neighbors": self.smote.k_neighbors, "rng_seed": self.smote.rng_seed},
        }


@dataclass
class FoldArtifacts:
    """In-memory fold data kept for audits; never serialized."""

    train_indices: np.ndarray
    val_indices: np.ndarray
    vocabulary: Vocabulary
    val_matrix: FeatureMatrix
    train_matrix: FeatureMatrix


@dataclass
class FoldResult:
    fold: int
    n_train: int
    n_val: int
    vocabulary_size: int
    resample: ResampleReport
    metrics: dict[str, MetricsReport]
    artifacts: FoldArtifacts | None = None


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    folds: list[FoldResult]
    aggregates: dict[str, AggregateReport]
    final_model: str | None = None

    def model_names(self) -> list[str]:
        return [s.name for s in self.config.models]

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "config": self.config.to_dict(),
            "averaging": "weighted",
            "models": {
                name: {
                    "aggregate": self.aggregates[name].to_dict(),
                    "folds": [f.metrics[name].to_dict() for f in self.folds],
                }
                for name in self.model_names()
            },
            "folds": [
                {"fold": f.fold, "n_train": f.n_train, "n_val": f.n_val,
                 "vocabulary_size": f.vocabulary_size, "resample": f.resample.to_dict()}
                for f in self.folds
            ],
            "final_model": self.final_model,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def fold_csv(self) -> str:
        """One row per (model, fold): the per-fold metric values behind a box plot."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "fold", *METRICS])
        for name in self.model_names():
            for f in self.folds:
                s = f.metrics[name].scalars()
                w.writerow([name, f.fold, *(repr(s[k]) for k in METRICS)])
        return buf.getvalue()


def resample(m: FeatureMatrix, mode: str, params: SmoteParams) -> tuple[FeatureMatrix, ResampleReport]:
    if mode == "none":
        return m, ResampleReport(synthetic_count={c: 0 for c in sorted(set(m.labels.tolist()))})
    if mode == "smote":
        return smote_only(m, params)
    return smote_tomek(m, params)


def run_fold(d: Dataset, plan: CvPlan, i: int, cfg: ExperimentConfig, keep_artifacts: bool = False
             ) -> FoldResult:
    train_idx, val_idx = plan.train_indices(i), plan.val_indices(i)
    train, val = d.subset(train_idx), d.subset(val_idx)
    vocab = _vec.fit(train, cfg.tfidf)
    X_train = _vec.transform(vocab, train, origin=train_idx)
    X_val = _vec.transform(vocab, val, origin=val_idx)
    balanced, rep = resample(X_train, cfg.resample, cfg.smote.for_fold(i))
    fold_seed = cfg.seed ^ i
    results = {}
    for spec in cfg.models:
        model = _models.train(spec, balanced, seed=fold_seed)
        pred = _models.predict(model, X_val)
        classes = sorted({lab.value for lab in d.labels})
        results[spec.name] = metrics(confusion_matrix(X_val.labels, pred, classes))
        log.info("fold %d %s accuracy %.4f", i, spec.name, results[spec.name].accuracy)
    art = FoldArtifacts(train_idx, val_idx, vocab, X_val, balanced) if keep_artifacts else None
    return FoldResult(i, len(train_idx), len(val_idx), len(vocab), rep, results, art)


def run_cv(d: Dataset, cfg: ExperimentConfig, jobs: int = 1, keep_artifacts: bool = False
           ) -> ExperimentReport:
    """Cross-validate every model in ``cfg``; folds may run in parallel threads."""
    plan = stratified_kfold(d.labels, cfg.k, cfg.seed)

    def one(i):
        try:
            return run_fold(d, plan, i, cfg, keep_artifacts)
        except ReqSmoteError as exc:
            raise FoldError(i, exc) from exc
        except (ValueError, ArithmeticError) as exc:
            raise FoldError(i, exc) from exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(one, range(cfg.k)))
    else:
        folds = [one(i) for i in range(cfg.k)]
    aggregates = {s.name: aggregate([f.metrics[s.name] for f in folds]) for s in cfg.models}
    return ExperimentReport(cfg, folds, aggregates)


def train_final(d: Dataset, cfg: ExperimentConfig, spec: ModelSpec) -> TrainedModel:
    """Fit vocabulary, resampling and ``spec`` on the whole dataset.

    The returned model carries its vocabulary and the resampling report in
    ``info`` so it can be saved as one self-contained document.
    """
    vocab = _vec.fit(d, cfg.tfidf)
    X = _vec.transform(vocab, d)
    balanced, rep = resample(X, cfg.resample, cfg.smote)
    model = _models.train(spec, balanced, seed=cfg.seed)
    model.vocabulary = vocab
    model.info = {**model.info, "resample_mode": cfg.resample, "resample": rep.to_dict(),
                  "seed": cfg.seed, "smote_k_neighbors": cfg.smote.k_neighbors,
                  "smote_seed": cfg.smote.rng_seed}
    return model
