"""Multinomial naive Bayes over non-negative (possibly fractional) term weights."""

from __future__ import annotations

import numpy as np


def fit(X: np.ndarray, labels: np.ndarray, classes: list[str], alpha: float = 1.0
        ) -> tuple[np.ndarray, np.ndarray]:
    """Class log-priors and per-class term log-likelihoods with additive smoothing.

    Parameters:
        X: (n, V) non-negative weights, treated as fractional counts.
        labels: class code per row.
        classes: class order of the returned arrays.
        alpha: Laplace/Lidstone smoothing constant.

    Returns:
        (log_prior, log_lik) with shapes (n_classes,) and (n_classes, V).
    """
    n, V = X.shape
    log_prior = np.empty(len(classes))
    log_lik = np.empty((len(classes), V))
    for c, cls in enumerate(classes):
        mask = labels == cls
        counts = X[mask].sum(axis=0) + alpha
        log_prior[c] = np.log(mask.sum() / n)
        log_lik[c] = np.log(counts) - np.log(counts.sum())
    return log_prior, log_lik


def joint_log_likelihood(log_prior: np.ndarray, log_lik: np.ndarray, X: np.ndarray) -> np.ndarray:
    return X @ log_lik.T + log_prior


def posterior(log_prior: np.ndarray, log_lik: np.ndarray, X: np.ndarray) -> np.ndarray:
    jll = joint_log_likelihood(log_prior, log_lik, X)
    jll -= jll.max(axis=1, keepdims=True)
    p = np.exp(jll)
    return p / p.sum(axis=1, keepdims=True)
