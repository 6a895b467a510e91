"""One-vs-rest linear SVM, L1 hinge loss, trained by dual coordinate descent.

Per binary problem the primal is

    P(w) = 0.5 ||w||^2 + C * sum_i max(0, 1 - y_i w . x_i)

with the bias folded into ``w`` through a constant feature of 1 (so it is
regularised too, as in liblinear).
"""

from __future__ import annotations

import numba
import numpy as np
import scipy.sparse as sp


def primal_objective(w: np.ndarray, X: np.ndarray, y: np.ndarray, C: float) -> float:
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    margins = 1.0 - y * (Xa @ w)
    return 0.5 * float(w @ w) + C * float(np.maximum(margins, 0.0).sum())


@numba.njit(cache=True)
def _dcd(indptr, indices, data, y, C, max_epochs, seed, tol):
    n = y.shape[0]
    d = 0
    for j in indices:
        if j + 1 > d:
            d = j + 1
    w = np.zeros(d)
    alpha = np.zeros(n)
    qdiag = np.zeros(n)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            qdiag[i] += data[p] * data[p]
    np.random.seed(seed)
    epochs = 0
    for e in range(max_epochs):
        epochs = e + 1
        max_pg = -np.inf
        min_pg = np.inf
        for i in np.random.permutation(n):
            g = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                g += w[indices[p]] * data[p]
            g = y[i] * g - 1.0
            a = alpha[i]
            if a == 0.0:
                pg = min(g, 0.0)
            elif a == C:
                pg = max(g, 0.0)
            else:
                pg = g
            if pg > max_pg:
                max_pg = pg
            if pg < min_pg:
                min_pg = pg
            if pg != 0.0 and qdiag[i] > 0.0:
                a_new = min(max(a - g / qdiag[i], 0.0), C)
                delta = (a_new - a) * y[i]
                for p in range(indptr[i], indptr[i + 1]):
                    w[indices[p]] += delta * data[p]
                alpha[i] = a_new
        if max_pg - min_pg < tol:
            break
    return w, epochs


def fit_binary(X: np.ndarray, y: np.ndarray, C: float = 1.0, max_epochs: int = 1000, tol: float = 0.1,
               rng: np.random.Generator | None = None) -> np.ndarray:
    """Weights (last entry is the bias) for labels ``y`` in {-1, +1}.

    Stops when the spread of projected gradients over an epoch drops below
    ``tol`` (liblinear's criterion) or after ``max_epochs``.
    """
    rng = rng or np.random.default_rng(0)
    n, d = X.shape
    Xa = sp.csr_matrix(np.hstack([X, np.ones((n, 1))]))
    Xa.eliminate_zeros()
    seed = int(rng.integers(0, 2**31 - 1))
    w, _ = _dcd(Xa.indptr.astype(np.int64), Xa.indices.astype(np.int64), Xa.data,
                np.asarray(y, dtype=np.float64), float(C), int(max_epochs), seed, float(tol))
    out = np.zeros(d + 1)
    out[: w.shape[0]] = w
    return out


def fit_ovr(X: np.ndarray, labels: np.ndarray, classes: list[str], C: float = 1.0,
            max_epochs: int = 1000, tol: float = 0.1, seed: int = 0) -> np.ndarray:
    """Stacked one-vs-rest weights, shape (n_classes, n_features + 1)."""
    rng = np.random.default_rng(seed)
    W = np.empty((len(classes), X.shape[1] + 1))
    for c, cls in enumerate(classes):
        y = np.where(labels == cls, 1.0, -1.0)
        W[c] = fit_binary(X, y, C, max_epochs, tol, rng=rng)
    return W


def decision_function(W: np.ndarray, X: np.ndarray) -> np.ndarray:
    return X @ W[:, :-1].T + W[:, -1]
