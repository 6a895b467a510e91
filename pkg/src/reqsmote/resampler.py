"""SMOTE oversampling, Tomek-link cleaning and the combined SMOTE-Tomek pass.

Neighbour searches are exact and brute force. Distance ties always go to the
lowest row index, so results are reproducible and checkable against an
all-pairs oracle.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyMatrixError, StaleLinksError
from .vectorizer import SYNTHETIC, FeatureMatrix

log = logging.getLogger(__name__)

_CHUNK = 512


@dataclass(frozen=True)
class SmoteParams:
    k_neighbors: int = 5
    rng_seed: int = 42

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")

    def for_fold(self, fold: int) -> "SmoteParams":
        return SmoteParams(self.k_neighbors, self.rng_seed ^ fold)


@dataclass(frozen=True)
class TomekLink:
    index_a: int
    index_b: int
    label_a: str
    label_b: str


@dataclass
class ResampleReport:
    synthetic_count: dict[str, int] = field(default_factory=dict)
    removed_indices: list[int] = field(default_factory=list)
    link_count: int = 0

    def to_dict(self) -> dict:
        return {
            "synthetic_count": dict(self.synthetic_count),
            "removed_indices": list(self.removed_indices),
            "link_count": self.link_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _sq_norms(X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", X, X)


def _exact_sq(X: np.ndarray, i: int, cols: np.ndarray) -> np.ndarray:
    diff = X[cols] - X[i]
    return np.einsum("ij,ij->i", diff, diff)


def nearest_neighbors(X: np.ndarray, k: int = 1) -> np.ndarray:
    """Indices of the ``k`` nearest other rows for every row of ``X``.

    Squared distances come from the Gram expansion, then every candidate whose
    approximate distance is within rounding error of the k-th smallest is
    re-scored exactly, so the ranking (ties to the lower index) matches a
    direct all-pairs computation.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n_rows, got k={k}, n={n}")
    sq = _sq_norms(X)
    out = np.empty((n, k), dtype=np.int64)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        D = sq[start:stop, None] + sq[None, :] - 2.0 * (X[start:stop] @ X.T)
        rows = np.arange(start, stop)
        D[rows - start, rows] = np.inf
        kth = np.partition(D, k - 1, axis=1)[:, k - 1]
        slack = 1e-9 * (sq[start:stop] + sq.max()) + 1e-300
        for r, i in enumerate(rows):
            cand = np.flatnonzero(D[r] <= kth[r] + slack[r])
            exact = _exact_sq(X, i, cand)
            # lexsort: primary key exact distance, secondary the row index
            order = np.lexsort((cand, exact))
            out[i] = cand[order[:k]]
    return out


def _class_order(labels: np.ndarray) -> list[str]:
    return sorted(set(labels.tolist()))


def smote_oversample(m: FeatureMatrix, p: SmoteParams | None = None,
                     lambdas: Sequence[float] | None = None) -> FeatureMatrix:
    """Raise every class to the majority count with interpolated rows.

    Each synthetic row is ``x_i + lam * (x_nn - x_i)``: ``x_i`` is drawn
    uniformly from the class, ``x_nn`` uniformly from its
    ``min(k_neighbors, class_count - 1)`` nearest same-class rows, and
    ``lam ~ U[0, 1)``. Originals come first, unchanged, then synthetic rows
    grouped by class in label order. Each class draws from its own stream
    seeded by ``(rng_seed, class position)``.

    ``lambdas`` overrides the interpolation factors (used by tests to pin the
    endpoints); it is consumed in output order.
    """
    p = p or SmoteParams()
    if len(m) == 0:
        raise EmptyMatrixError("cannot oversample an empty matrix")
    counts = Counter(m.labels.tolist())
    target = max(counts.values())
    new_rows, new_labels = [], []
    lam_iter = iter(lambdas) if lambdas is not None else None

    for pos, cls in enumerate(_class_order(m.labels)):
        need = target - counts[cls]
        if need == 0:
            continue
        members = np.flatnonzero(m.labels == cls)
        Xc = m.rows[members]
        rng = np.random.default_rng([p.rng_seed, pos])
        k_eff = min(p.k_neighbors, len(members) - 1)
        if k_eff == 0:
            log.warning("class %s has a single row; duplicating it %d times", cls, need)
            new_rows.append(np.repeat(Xc, need, axis=0))
            new_labels += [cls] * need
            continue
        nn = nearest_neighbors(Xc, k_eff)
        base = rng.integers(0, len(members), size=need)
        pick = rng.integers(0, k_eff, size=need)
        lam = rng.random(need)
        if lam_iter is not None:
            lam = np.array([next(lam_iter) for _ in range(need)], dtype=np.float64)
        xi = Xc[base]
        xnn = Xc[nn[base, pick]]
        new_rows.append(xi + lam[:, None] * (xnn - xi))
        new_labels += [cls] * need

    if not new_labels:
        return FeatureMatrix(m.rows.copy(), m.labels.copy(), m.row_origin.copy())
    rows = np.vstack([m.rows] + new_rows)
    labels = np.concatenate([m.labels, np.array(new_labels, dtype=object)])
    origin = np.concatenate([m.row_origin, np.full(len(new_labels), SYNTHETIC, dtype=np.int64)])
    return FeatureMatrix(rows, labels, origin)


def _synthetic_counts(m: FeatureMatrix) -> dict[str, int]:
    counts = Counter(m.labels.tolist())
    target = max(counts.values())
    return {cls: target - counts[cls] for cls in _class_order(m.labels)}


def find_tomek_links(m: FeatureMatrix) -> list[TomekLink]:
    """Pairs of rows with different labels that are each other's nearest neighbour."""
    if len(m) < 2:
        return []
    nn = nearest_neighbors(m.rows, 1)[:, 0]
    links = []
    for i, j in enumerate(nn):
        if i < j and nn[j] == i and m.labels[i] != m.labels[j]:
            links.append(TomekLink(int(i), int(j), m.labels[i], m.labels[j]))
    return links


def original_distribution(m: FeatureMatrix) -> dict[str, int]:
    """Class counts over non-synthetic rows, i.e. the pre-SMOTE distribution."""
    return dict(Counter(m.labels[~m.is_synthetic].tolist()))


def remove_tomek_majority(m: FeatureMatrix, links: Sequence[TomekLink],
                          class_counts: Mapping[str, int] | None = None
                          ) -> tuple[FeatureMatrix, ResampleReport]:
    """Drop the majority-class member of every link.

    Majority is judged on ``class_counts``, which defaults to the counts of the
    original (non-synthetic) rows. When both classes have the same count both
    members go. Survivors keep their relative order.
    """
    n = len(m)
    counts = original_distribution(m) if class_counts is None else dict(class_counts)
    drop = set()
    for link in links:
        a, b = link.index_a, link.index_b
        if not (0 <= a < n and 0 <= b < n):
            raise StaleLinksError(f"link ({a}, {b}) out of range for {n} rows")
        ca, cb = counts.get(m.labels[a], 0), counts.get(m.labels[b], 0)
        if ca >= cb:
            drop.add(a)
        if cb >= ca:
            drop.add(b)
    removed = sorted(drop)
    keep = np.setdiff1d(np.arange(n), removed)
    report = ResampleReport(removed_indices=removed, link_count=len(links))
    return m.take(keep), report


def smote_tomek(m: FeatureMatrix, p: SmoteParams | None = None) -> tuple[FeatureMatrix, ResampleReport]:
    """SMOTE to balance, then remove majority members of Tomek links."""
    counts = original_distribution(m)
    made = _synthetic_counts(m)
    balanced = smote_oversample(m, p)
    links = find_tomek_links(balanced)
    cleaned, report = remove_tomek_majority(balanced, links, counts)
    report.synthetic_count = made
    return cleaned, report


def smote_only(m: FeatureMatrix, p: SmoteParams | None = None) -> tuple[FeatureMatrix, ResampleReport]:
    made = _synthetic_counts(m)
    return smote_oversample(m, p), ResampleReport(synthetic_count=made)
