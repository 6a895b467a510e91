"""Uniform train / predict interface over the five classifier families."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatchError, SingleClassTrainingError, UnsupportedModelError
from ..vectorizer import FeatureMatrix, Vocabulary
from . import knn as _knn
from . import linear_svm as _svm
from . import logistic as _lr
from . import naive_bayes as _nb
from . import tree as _tree

KINDS = ("logistic_regression", "linear_svm", "multinomial_nb", "knn", "decision_tree")

MODEL_FORMAT = "reqsmote-model"
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        hp = {**_DEFAULTS[self.kind], **self.hyperparameters}
        object.__setattr__(self, "hyperparameters", hp)
        if self.kind == "logistic_regression":
            if hp["C"] <= 0:
                raise ValueError("C must be > 0")
            if hp["solver"] not in _lr.SOLVERS:
                raise ValueError(f"unknown solver {hp['solver']!r}")
        elif self.kind == "linear_svm" and hp["C"] <= 0:
            raise ValueError("C must be > 0")
        elif self.kind == "multinomial_nb" and hp["alpha"] <= 0:
            raise ValueError("alpha must be > 0")
        elif self.kind == "knn" and (hp["k"] < 1 or hp["k"] % 2 == 0):
            raise ValueError("k must be odd and >= 1")
        elif self.kind == "decision_tree" and (hp["max_depth"] < 1 or hp["min_samples_split"] < 2):
            raise ValueError("max_depth must be >= 1 and min_samples_split >= 2")

    @property
    def name(self) -> str:
        if self.kind == "knn":
            return f"KNN (k={self.hyperparameters['k']})"
        return _DISPLAY[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hyperparameters": dict(self.hyperparameters)}

    @classmethod
    def logistic_regression(cls, C: float = 10.0, **kw) -> "ModelSpec":
        return cls("logistic_regression", {"C": C, **kw})

    @classmethod
    def linear_svm(cls, C: float = 1.0, **kw) -> "ModelSpec":
        return cls("linear_svm", {"C": C, **kw})

    @classmethod
    def multinomial_nb(cls, alpha: float = 1.0) -> "ModelSpec":
        return cls("multinomial_nb", {"alpha": alpha})

    @classmethod
    def knn(cls, k: int = 5) -> "ModelSpec":
        return cls("knn", {"k": k})

    @classmethod
    def decision_tree(cls, max_depth: int = 32, min_samples_split: int = 2) -> "ModelSpec":
        return cls("decision_tree", {"max_depth": max_depth, "min_samples_split": min_samples_split})


_DEFAULTS = {
    "logistic_regression": {"C": 10.0, "penalty": "l2", "solver": "gd", "max_epochs": 2000, "tol": 1e-6},
    "linear_svm": {"C": 1.0, "max_epochs": 1000, "tol": 0.1},
    "multinomial_nb": {"alpha": 1.0},
    "knn": {"k": 5},
    "decision_tree": {"max_depth": 32, "min_samples_split": 2, "criterion": "gini"},
}

_DISPLAY = {
    "logistic_regression": "Logistic Regression",
    "linear_svm": "SVM (Linear)",
    "multinomial_nb": "Naive Bayes",
    "decision_tree": "Decision Tree",
}

# short names used on the command line
SHORT_NAMES = {
    "lr": ModelSpec.logistic_regression,
    "svm": ModelSpec.linear_svm,
    "nb": ModelSpec.multinomial_nb,
    "knn3": lambda: ModelSpec.knn(3),
    "knn5": lambda: ModelSpec.knn(5),
    "knn7": lambda: ModelSpec.knn(7),
    "dt": ModelSpec.decision_tree,
}


@dataclass
class TrainedModel:
    spec: ModelSpec
    classes: list[str]
    n_features: int
    params: dict[str, Any]
    vocabulary: Vocabulary | None = None
    info: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return self.spec.kind


def _unpack(m) -> tuple[np.ndarray, np.ndarray | None]:
    if isinstance(m, FeatureMatrix):
        return m.rows, m.labels
    return np.atleast_2d(np.asarray(m, dtype=np.float64)), None


def train(spec: ModelSpec, m: FeatureMatrix, seed: int = 0) -> TrainedModel:
    """Fit ``spec`` on ``m``. Identical inputs and seed give bit-identical parameters."""
    X, labels = m.rows, m.labels
    if X.shape[0] == 0:
        raise DimensionMismatchError("cannot train on an empty matrix")
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2 and spec.kind != "multinomial_nb":
        raise SingleClassTrainingError(f"{spec.name} needs at least two classes, got {classes}")
    hp = spec.hyperparameters
    cls_idx = np.searchsorted(classes, labels.astype(str))
    info: dict = {}

    if spec.kind == "logistic_regression":
        Y = np.zeros((X.shape[0], len(classes)))
        Y[np.arange(X.shape[0]), cls_idx] = 1.0
        res = _lr.SOLVERS[hp["solver"]](X, Y, hp["C"], hp["max_epochs"], hp["tol"], seed)
        params = {"W": res.W, "b": res.b}
        info = {"epochs": len(res.loss_history) - 1, "converged": res.converged,
                "final_loss": res.loss_history[-1]}
    elif spec.kind == "linear_svm":
        params = {"W": _svm.fit_ovr(X, labels, classes, hp["C"], hp["max_epochs"], hp["tol"], seed)}
    elif spec.kind == "multinomial_nb":
        log_prior, log_lik = _nb.fit(X, labels, classes, hp["alpha"])
        params = {"log_prior": log_prior, "log_lik": log_lik}
    elif spec.kind == "knn":
        params = {"X": X.copy(), "y": cls_idx.astype(np.int64)}
    else:
        params = {"tree": _tree.fit(X, cls_idx, len(classes), hp["max_depth"], hp["min_samples_split"])}
    return TrainedModel(spec, classes, X.shape[1], params, info=info)


def _check_width(model: TrainedModel, X: np.ndarray) -> None:
    if X.shape[1] != model.n_features:
        raise DimensionMismatchError(f"model expects {model.n_features} features, got {X.shape[1]}")


def decision_scores(model: TrainedModel, m) -> np.ndarray:
    X, _ = _unpack(m)
    _check_width(model, X)
    p = model.params
    if model.kind == "logistic_regression":
        return X @ p["W"].T + p["b"]
    if model.kind == "linear_svm":
        return _svm.decision_function(p["W"], X)
    if model.kind == "multinomial_nb":
        return _nb.joint_log_likelihood(p["log_prior"], p["log_lik"], X)
    raise UnsupportedModelError(f"{model.spec.name} has no decision scores")


def predict_proba(model: TrainedModel, m) -> np.ndarray:
    """Class probabilities, columns in ``model.classes`` order (LR and NB only)."""
    if model.kind == "logistic_regression":
        return _lr.softmax(decision_scores(model, m))
    if model.kind == "multinomial_nb":
        X, _ = _unpack(m)
        _check_width(model, X)
        return _nb.posterior(model.params["log_prior"], model.params["log_lik"], X)
    raise UnsupportedModelError(f"{model.spec.name} does not produce probabilities")


def predict(model: TrainedModel, m) -> np.ndarray:
    """Predicted class codes, one per row."""
    X, _ = _unpack(m)
    _check_width(model, X)
    if model.kind in ("logistic_regression", "multinomial_nb"):
        idx = np.argmax(predict_proba(model, X), axis=1)
    elif model.kind == "linear_svm":
        idx = np.argmax(decision_scores(model, X), axis=1)
    elif model.kind == "knn":
        p = model.params
        train_y = np.asarray(model.classes, dtype=object)[p["y"]]
        idx = _knn.predict(p["X"], train_y, model.classes, X, model.spec.hyperparameters["k"])
    else:
        tree = model.params["tree"]
        idx = np.argmax(tree.counts[tree.apply(X)], axis=1)
    return np.asarray(model.classes, dtype=object)[idx]


def top_features(model: TrainedModel, v: Vocabulary | None = None, n: int = 10
                 ) -> dict[str, list[tuple[str, float]]]:
    """Per class, the ``n`` terms with the largest positive LR coefficients, descending."""
    if model.kind != "logistic_regression":
        raise UnsupportedModelError("top_features needs a logistic_regression model")
    v = v or model.vocabulary
    if v is None:
        raise ValueError("no vocabulary given and none attached to the model")
    if len(v) != model.n_features:
        raise DimensionMismatchError(f"vocabulary has {len(v)} terms, model {model.n_features}")
    out = {}
    for c, cls in enumerate(model.classes):
        w = model.params["W"][c]
        order = np.argsort(-w, kind="stable")
        out[cls] = [(v.terms[j], float(w[j])) for j in order[:max(n, 0)] if w[j] > 0]
    return out


def _encode(value):
    if isinstance(value, _tree.Tree):
        return {"__tree__": value.to_dict()}
    if isinstance(value, np.ndarray) and value.ndim == 2 and value.dtype == np.float64:
        csr = sp.csr_matrix(value)
        return {"__csr__": {"shape": list(value.shape), "data": csr.data.tolist(),
                            "indices": csr.indices.tolist(), "indptr": csr.indptr.tolist()}}
    return value.tolist()


def _decode(value):
    if isinstance(value, dict) and "__tree__" in value:
        return _tree.Tree.from_dict(value["__tree__"])
    if isinstance(value, dict) and "__csr__" in value:
        d = value["__csr__"]
        return sp.csr_matrix((d["data"], d["indices"], d["indptr"]), shape=tuple(d["shape"])).toarray()
    return np.asarray(value)


def to_dict(model: TrainedModel) -> dict:
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        **model.spec.to_dict(),
        "classes": list(model.classes),
        "n_features": model.n_features,
        "params": {k: _encode(v) for k, v in model.params.items()},
        "info": model.info,
    }
    if model.vocabulary is not None:
        doc["vocabulary"] = model.vocabulary.to_dict()
    return doc


def from_dict(doc: dict) -> TrainedModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a serialized model document")
    spec = ModelSpec(doc["kind"], doc["hyperparameters"])
    params = {k: _decode(v) for k, v in doc["params"].items()}
    vocab = Vocabulary.from_dict(doc["vocabulary"]) if "vocabulary" in doc else None
    return TrainedModel(spec, list(doc["classes"]), doc["n_features"], params, vocab, doc.get("info", {}))


def save(model: TrainedModel, path) -> None:
    Path(path).write_text(json.dumps(to_dict(model)), encoding="utf-8")


def load(path) -> TrainedModel:
    return from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
