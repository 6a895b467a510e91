"""Multinomial (softmax) logistic regression with an L2 penalty.

The objective, in sklearn's parametrisation divided by ``C * n``, is

    f(W, b) = mean_i CE(softmax(W x_i + b), y_i) + ||W||^2 / (2 C n)

where the intercept ``b`` is not penalised. Two solvers are provided:

``"gd"``
    Full-batch gradient descent with Nesterov momentum and a monotone
    safeguard: a momentum step that would raise the loss is discarded and
    replaced by a plain gradient step, which cannot raise it for step size
    1/L. The loss is therefore non-increasing epoch to epoch.
``"saga"``
    SAGA with a per-sample gradient table, step ``1 / (3 L_max)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    np.exp(Z, out=Z)
    Z /= Z.sum(axis=1, keepdims=True)
    return Z


def _logsumexp(Z: np.ndarray) -> np.ndarray:
    zmax = Z.max(axis=1)
    return zmax + np.log(np.exp(Z - zmax[:, None]).sum(axis=1))


def loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray, C: float
                  ) -> tuple[float, np.ndarray, np.ndarray]:
    """Regularised mean cross-entropy and its gradient.

    Parameters:
        W: (n_classes, n_features) weights.
        b: (n_classes,) intercepts.
        X: (n, n_features) inputs.
        Y: (n, n_classes) one-hot targets.
        C: inverse regularisation strength.
    """
    n = X.shape[0]
    Z = X @ W.T + b
    lse = _logsumexp(Z)
    loss = float(np.mean(lse - np.einsum("ij,ij->i", Z, Y)))
    reg = 1.0 / (C * n)
    loss += 0.5 * reg * float(np.vdot(W, W))
    R = softmax(Z) - Y
    gW = np.asarray((X.T @ R).T) / n + reg * W
    gb = R.mean(axis=0)
    return loss, gW, gb


def _lipschitz(X: np.ndarray, C: float, seed: int = 0, iters: int = 50) -> float:
    """Upper bound on the gradient's Lipschitz constant.

    The softmax cross-entropy Hessian is bounded by 0.5 * Xa^T Xa / n (Xa is X
    with a ones column), so power iteration on that Gram matrix suffices.
    """
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(X.shape[1] + 1)
    lam = 0.0
    for _ in range(iters):
        u = X @ v[:-1] + v[-1]
        w = np.append(np.asarray(X.T @ u).ravel(), u.sum())
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            break
        v = w / lam
    # power iteration under-estimates; pad it
    return 0.5 * lam * 1.05 / n + 1.0 / (C * n)


@dataclass
class LogisticFit:
    W: np.ndarray
    b: np.ndarray
    loss_history: list[float] = field(default_factory=list)
    converged: bool = False


def _maybe_sparse(X: np.ndarray):
    if sp.issparse(X) or X.size == 0:
        return X
    if np.count_nonzero(X) < 0.1 * X.size:
        return sp.csr_matrix(X)
    return X


def fit_gd(X: np.ndarray, Y: np.ndarray, C: float, max_epochs: int = 2000, tol: float = 1e-6,
           seed: int = 0) -> LogisticFit:
    X = _maybe_sparse(X)
    n, d = X.shape
    k = Y.shape[1]
    step = 1.0 / _lipschitz(X, C, seed)
    W = np.zeros((k, d))
    b = np.zeros(k)
    f, gW, gb = loss_and_grad(W, b, X, Y, C)
    hist = [f]
    W_prev, b_prev = W, b
    t = 1.0
    converged = False
    for _ in range(max_epochs):
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / t_next
        Vw = W + mom * (W - W_prev)
        Vb = b + mom * (b - b_prev)
        _, vgW, vgb = loss_and_grad(Vw, Vb, X, Y, C)
        Wn, bn = Vw - step * vgW, Vb - step * vgb
        fn, gWn, gbn = loss_and_grad(Wn, bn, X, Y, C)
        if fn > f:
            # restart: plain gradient step from the current iterate
            t_next = 1.0
            while True:
                Wn, bn = W - step * gW, b - step * gb
                fn, gWn, gbn = loss_and_grad(Wn, bn, X, Y, C)
                if fn <= f or step < 1e-12:
                    break
                step *= 0.5
        W_prev, b_prev = W, b
        W, b, gW, gb, t = Wn, bn, gWn, gbn, t_next
        delta = f - fn
        f = fn
        hist.append(f)
        if 0.0 <= delta < tol:
            converged = True
            break
    return LogisticFit(W, b, hist, converged)


@numba.njit(cache=True)
def _saga_epochs(indptr, indices, data, Y, W, b, table, avg_W, avg_b, step, reg, order):
    n = Y.shape[0]
    k = Y.shape[1]
    z = np.empty(k)
    dr = np.empty(k)
    for i in order:
        for c in range(k):
            acc = b[c]
            for p in range(indptr[i], indptr[i + 1]):
                acc += W[c, indices[p]] * data[p]
            z[c] = acc
        zmax = z.max()
        tot = 0.0
        for c in range(k):
            z[c] = np.exp(z[c] - zmax)
            tot += z[c]
        for c in range(k):
            r = z[c] / tot - Y[i, c]
            dr[c] = r - table[i, c]
            table[i, c] = r
        # dense part: running average and L2 term touch every weight
        shrink = 1.0 - step * reg
        for c in range(k):
            for j in range(W.shape[1]):
                W[c, j] = shrink * W[c, j] - step * avg_W[c, j]
            b[c] -= step * (dr[c] + avg_b[c])
        for c in range(k):
            for p in range(indptr[i], indptr[i + 1]):
                W[c, indices[p]] -= step * dr[c] * data[p]
                avg_W[c, indices[p]] += dr[c] * data[p] / n
            avg_b[c] += dr[c] / n


def fit_saga(X: np.ndarray, Y: np.ndarray, C: float, max_epochs: int = 2000, tol: float = 1e-6,
             seed: int = 0) -> LogisticFit:
    """SAGA over samples; the L2 term is applied with the full weights each step."""
    Xs = sp.csr_matrix(X, dtype=np.float64)
    n, d = Xs.shape
    k = Y.shape[1]
    rng = np.random.default_rng(seed)
    lmax = 0.5 * (float(Xs.multiply(Xs).sum(axis=1).max()) + 1.0)
    reg = 1.0 / (C * n)
    step = 1.0 / (3.0 * (lmax + reg))
    W = np.zeros((k, d))
    b = np.zeros(k)
    # per-sample residuals; a sample's gradient is outer(r_i, x_i)
    table = softmax(np.zeros((n, k))) - Y
    avg_W = np.asarray((Xs.T @ table).T) / n
    avg_b = table.mean(axis=0)
    indptr, indices = Xs.indptr.astype(np.int64), Xs.indices.astype(np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    f, _, _ = loss_and_grad(W, b, Xs, Y, C)
    hist = [f]
    converged = False
    for _ in range(max_epochs):
        order = rng.integers(0, n, size=n)
        _saga_epochs(indptr, indices, Xs.data, Y, W, b, table, avg_W, avg_b, step, reg, order)
        fn, _, _ = loss_and_grad(W, b, Xs, Y, C)
        delta = abs(f - fn)
        f = fn
        hist.append(f)
        if delta < tol:
            converged = True
            break
    return LogisticFit(W, b, hist, converged)


SOLVERS = {"gd": fit_gd, "saga": fit_saga}
