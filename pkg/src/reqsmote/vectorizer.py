"""TF-IDF featurization of requirement sentences.

Weights are raw in-sentence counts times a smoothed idf,

    idf(t) = ln((1 + N) / (1 + df(t))) + 1,

and each row is scaled to unit Euclidean norm (all-zero rows stay zero).
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Dataset, Label
from .errors import DimensionMismatchError, EmptyInputError, EmptyVocabularyError

SYNTHETIC = -1
NONZERO_THRESHOLD = 1e-12


@dataclass(frozen=True)
class TfidfConfig:
    lowercase: bool = True
    # maximal alphanumeric runs of length >= 2; digits are kept
    token_pattern: str = r"(?u)[^\W_]{2,}"
    stop_words: frozenset[str] = frozenset()
    min_df: int = 1

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        object.__setattr__(self, "stop_words", frozenset(self.stop_words))

    def tokenize(self, text: str) -> list[str]:
        if self.lowercase:
            text = text.lower()
        toks = re.findall(self.token_pattern, text)
        if self.stop_words:
            toks = [t for t in toks if t not in self.stop_words]
        return toks

    def to_dict(self) -> dict:
        return {
            "lowercase": self.lowercase,
            "token_pattern": self.token_pattern,
            "stop_words": sorted(self.stop_words),
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TfidfConfig":
        return cls(d["lowercase"], d["token_pattern"], frozenset(d["stop_words"]), d["min_df"])


@dataclass(frozen=True)
class Vocabulary:
    """Fitted term index. Columns follow alphabetical term order."""

    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int
    config: TfidfConfig = field(default_factory=TfidfConfig)

    def __len__(self) -> int:
        return len(self.terms)

    @cached_property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    @cached_property
    def idf(self) -> np.ndarray:
        df = np.asarray(self.df, dtype=np.float64)
        return np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0

    def dumps(self) -> str:
        """Text form: ``N=<docs>`` header then one ``term,df`` line per column."""
        lines = [f"N={self.n_docs}"]
        lines += [f"{t},{d}" for t, d in zip(self.terms, self.df)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, config: TfidfConfig | None = None) -> "Vocabulary":
        head, *rows = text.strip("\n").split("\n")
        if not head.startswith("N="):
            raise ValueError("vocabulary text must start with an N=<docs> header")
        terms, dfs = [], []
        for row in rows:
            t, d = row.rsplit(",", 1)
            terms.append(t)
            dfs.append(int(d))
        return cls(tuple(terms), tuple(dfs), int(head[2:]), config or TfidfConfig())

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def to_dict(self) -> dict:
        return {"n_docs": self.n_docs, "terms": list(self.terms), "df": list(self.df),
                "config": self.config.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(tuple(d["terms"]), tuple(d["df"]), d["n_docs"], TfidfConfig.from_dict(d["config"]))


@dataclass
class FeatureMatrix:
    """Dense feature rows with parallel labels and provenance.

    ``row_origin[r]`` is the source row index of an original row, or
    ``SYNTHETIC`` (-1) for rows created by oversampling.
    """

    rows: np.ndarray
    labels: np.ndarray
    row_origin: np.ndarray

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise DimensionMismatchError(f"rows must be 2-D, got shape {self.rows.shape}")
        self.labels = np.asarray([Label(x).value for x in self.labels], dtype=object)
        self.row_origin = np.asarray(self.row_origin, dtype=np.int64)
        n = self.rows.shape[0]
        if self.labels.shape != (n,) or self.row_origin.shape != (n,):
            raise DimensionMismatchError("rows, labels and row_origin lengths differ")

    @classmethod
    def from_arrays(cls, rows, labels, row_origin=None) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.float64)
        if row_origin is None:
            row_origin = np.arange(rows.shape[0])
        return cls(rows, labels, row_origin)

    def __len__(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def is_synthetic(self) -> np.ndarray:
        return self.row_origin == SYNTHETIC

    def take(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return FeatureMatrix(self.rows[idx], self.labels[idx], self.row_origin[idx])


def _texts(corpus) -> list[str]:
    if isinstance(corpus, Dataset):
        return corpus.texts
    if isinstance(corpus, str):
        return [corpus]
    return list(corpus)


def _labels(corpus, n: int):
    if isinstance(corpus, Dataset):
        return corpus.labels
    return [Label.F] * n


def fit(corpus: Dataset | Iterable[str], cfg: TfidfConfig | None = None) -> Vocabulary:
    """Build the vocabulary and document frequencies of ``corpus``."""
    cfg = cfg or TfidfConfig()
    texts = _texts(corpus)
    if not texts:
        raise EmptyInputError("cannot fit a vocabulary on an empty corpus")
    df = Counter()
    for text in texts:
        df.update(set(cfg.tokenize(text)))
    terms = sorted(t for t, c in df.items() if c >= cfg.min_df)
    if not terms:
        raise EmptyVocabularyError("no term survived tokenization and filtering")
    return Vocabulary(tuple(terms), tuple(df[t] for t in terms), len(texts), cfg)


def transform(v: Vocabulary, corpus: Dataset | Iterable[str], origin: Sequence[int] | None = None,
              labels=None) -> FeatureMatrix:
    """Map sentences to L2-normalised TF-IDF rows over ``v``'s columns.

    Out-of-vocabulary tokens are dropped. Plain string iterables get the
    placeholder label ``F`` unless ``labels`` is given.
    """
    texts = _texts(corpus)
    n = len(texts)
    X = np.zeros((n, len(v)), dtype=np.float64)
    index = v.index
    for r, text in enumerate(texts):
        for tok, cnt in Counter(v.config.tokenize(text)).items():
            j = index.get(tok)
            if j is not None:
                X[r, j] = cnt
    X *= v.idf
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    nz = norms > 0
    X[nz] /= norms[nz, None]
    if labels is None:
        labels = _labels(corpus, n)
    if origin is None:
        origin = np.arange(n)
    return FeatureMatrix(X, labels, origin)


def fit_transform(corpus, cfg: TfidfConfig | None = None) -> tuple[Vocabulary, FeatureMatrix]:
    v = fit(corpus, cfg)
    return v, transform(v, corpus)


def nonzero_terms(v: Vocabulary, row) -> list[str]:
    """Alphabetically sorted terms whose weight in ``row`` exceeds 1e-12."""
    row = np.asarray(row, dtype=np.float64).ravel()
    if row.shape[0] != len(v):
        raise DimensionMismatchError(f"row has {row.shape[0]} entries, vocabulary has {len(v)}")
    return sorted(v.terms[j] for j in np.flatnonzero(row > NONZERO_THRESHOLD))
