"""Brute-force k-nearest-neighbour voting."""

from __future__ import annotations

import numpy as np

_CHUNK = 256


def predict(train_X: np.ndarray, train_y: np.ndarray, classes: list[str], X: np.ndarray, k: int
            ) -> np.ndarray:
    """Majority vote among the ``k`` closest training rows (Euclidean).

    Neighbour ranking ties go to the lower training index. Vote ties go to
    the class with the smaller summed neighbour distance, then to the earlier
    class in ``classes``.
    """
    k = min(k, train_X.shape[0])
    cls_index = {c: i for i, c in enumerate(classes)}
    y_idx = np.array([cls_index[c] for c in train_y])
    tsq = np.einsum("ij,ij->i", train_X, train_X)
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], _CHUNK):
        Q = X[start:start + _CHUNK]
        D = np.einsum("ij,ij->i", Q, Q)[:, None] + tsq[None, :] - 2.0 * (Q @ train_X.T)
        np.maximum(D, 0.0, out=D)
        # stable sort keeps lower indices first among equal distances
        nbrs = np.argsort(D, axis=1, kind="stable")[:, :k]
        for r in range(Q.shape[0]):
            votes = np.zeros(len(classes))
            dist = np.zeros(len(classes))
            for j in nbrs[r]:
                votes[y_idx[j]] += 1
                dist[y_idx[j]] += np.sqrt(D[r, j])
            best = np.flatnonzero(votes == votes.max())
            # np.argmin returns the first minimum, i.e. the earliest class
            out[start + r] = best[np.argmin(dist[best])]
    return out
