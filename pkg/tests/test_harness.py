import csv
import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqsmote import harness, vectorizer
from reqsmote.corpus import Dataset, Label, RequirementRecord
from reqsmote.errors import ClassTooSmallError, FoldError, SingleClassTrainingError
from reqsmote.harness import ExperimentConfig, run_cv, stratified_kfold, train_final
from reqsmote.models import ModelSpec, TrainedModel, predict, top_features
from reqsmote.toy import make_corpus
from reqsmote.vectorizer import SYNTHETIC

FAST = (ModelSpec.logistic_regression(), ModelSpec.multinomial_nb())


# --- fold planning ------------------------------------------------------------

def test_two_by_two_example():
    plan = stratified_kfold(["A", "A", "SE", "SE"], k=2, seed=0)
    for f in plan.folds:
        assert sorted(["A", "A", "SE", "SE"][i] for i in f) == ["A", "SE"]


def test_class_too_small():
    labels = ["PO"] * 12 + ["F"] * 20
    with pytest.raises(ClassTooSmallError) as exc:
        stratified_kfold(labels, k=13)
    assert exc.value.label == "PO" and exc.value.count == 12
    assert "PO" in str(exc.value) and "12" in str(exc.value)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(2, 40), min_size=1, max_size=8), st.integers(2, 10), st.integers(0, 10**6))
def test_plan_invariants(class_sizes, k, seed):
    class_sizes = [max(c, k) for c in class_sizes]
    labels = [f"c{i}" for i, c in enumerate(class_sizes) for _ in range(c)]
    np.random.default_rng(seed).shuffle(labels)
    plan = stratified_kfold(labels, k, seed)
    n = len(labels)
    flat = [i for f in plan.folds for i in f]
    assert sorted(flat) == list(range(n))
    glob = Counter(labels)
    per_class = {c: [] for c in glob}
    for f in plan.folds:
        fc = Counter(labels[i] for i in f)
        for c in glob:
            per_class[c].append(fc[c])
            assert abs(fc[c] / len(f) - glob[c] / n) <= 1 / len(f) + 1e-12
    for counts in per_class.values():
        assert max(counts) - min(counts) <= 1
    assert stratified_kfold(labels, k, seed) == plan


def test_train_and_val_indices_are_complementary():
    plan = stratified_kfold(["F"] * 9 + ["SE"] * 6, k=3, seed=1)
    for i in range(3):
        tr, va = plan.train_indices(i), plan.val_indices(i)
        assert not set(tr) & set(va)
        assert sorted(np.concatenate([tr, va])) == list(range(15))


# --- run_cv -------------------------------------------------------------------

def test_leakage_audit(toy_corpus):
    cfg = ExperimentConfig(FAST, k=5, seed=3)
    report = run_cv(toy_corpus, cfg, keep_artifacts=True)
    for f in report.folds:
        art = f.artifacts
        train = toy_corpus.subset(art.train_indices)
        v = vectorizer.fit(train, cfg.tfidf)
        assert v.terms == art.vocabulary.terms and list(v.df) == list(art.vocabulary.df)
        direct = vectorizer.transform(v, Dataset(toy_corpus[i] for i in art.val_indices))
        assert direct.rows.tobytes() == art.val_matrix.rows.tobytes()
        assert list(art.val_matrix.row_origin) == list(art.val_indices)
        assert not np.any(art.val_matrix.row_origin == SYNTHETIC)
        orig = art.train_matrix.row_origin[art.train_matrix.row_origin != SYNTHETIC]
        assert set(orig.tolist()) <= set(art.train_indices.tolist())
        assert not set(orig.tolist()) & set(art.val_indices.tolist())


def test_report_shape(toy_corpus):
    cfg = ExperimentConfig(FAST, k=4, seed=5)
    report = run_cv(toy_corpus, cfg)
    doc = report.to_dict()
    assert doc["report_version"] == harness.REPORT_VERSION
    for spec in FAST:
        assert len(doc["models"][spec.name]["folds"]) == 4
        assert doc["models"][spec.name]["aggregate"]["n_folds"] == 4
    assert len(doc["folds"]) == 4
    assert sum(f["n_val"] for f in doc["folds"]) == len(toy_corpus)


def test_determinism_and_parallel_folds(toy_corpus):
    cfg = ExperimentConfig(FAST, k=2, seed=9)
    a = run_cv(toy_corpus, cfg).to_json()
    b = run_cv(toy_corpus, cfg).to_json()
    c = run_cv(toy_corpus, cfg, jobs=2).to_json()
    assert a == b == c


def test_majority_stub_accuracy(toy_corpus, monkeypatch):
    def stub_train(spec, m, seed=0):
        top = Counter(m.labels.tolist()).most_common(1)[0][0]
        return TrainedModel(spec, [top], m.n_features, {"label": top})

    def stub_predict(model, m):
        return np.array([model.params["label"]] * len(m), dtype=object)

    monkeypatch.setattr(harness._models, "train", stub_train)
    monkeypatch.setattr(harness._models, "predict", stub_predict)
    cfg = ExperimentConfig((ModelSpec.multinomial_nb(),), resample="none", k=5, seed=1)
    report = run_cv(toy_corpus, cfg)
    plan = stratified_kfold(toy_corpus.labels, 5, 1)
    for f in report.folds:
        val = [toy_corpus[i].label.value for i in plan.val_indices(f.fold)]
        train_labels = [toy_corpus[i].label.value for i in plan.train_indices(f.fold)]
        top = Counter(train_labels).most_common(1)[0][0]
        assert f.metrics["Naive Bayes"].accuracy == pytest.approx(val.count(top) / len(val), abs=1e-12)


def test_resample_modes_change_training_rows(toy_corpus):
    sizes = {}
    for mode in ("none", "smote", "smote_tomek"):
        cfg = ExperimentConfig((ModelSpec.multinomial_nb(),), resample=mode, k=3, seed=2)
        f = run_cv(toy_corpus, cfg, keep_artifacts=True).folds[0]
        sizes[mode] = len(f.artifacts.train_matrix)
        if mode == "none":
            assert sizes[mode] == f.n_train
            assert sum(f.resample.synthetic_count.values()) == 0
    assert sizes["smote"] > sizes["none"]
    assert sizes["smote_tomek"] <= sizes["smote"]


def test_fold_failure_carries_context():
    # a 2-fold run where one training fold holds a single class
    recs = [RequirementRecord(str(i), f"word{i} shared text", Label.F) for i in range(4)]
    cfg = ExperimentConfig((ModelSpec.logistic_regression(),), resample="none", k=2, seed=0)
    with pytest.raises(FoldError) as exc:
        run_cv(Dataset(recs), cfg)
    assert exc.value.fold == 0
    assert isinstance(exc.value.cause, SingleClassTrainingError)


def test_fold_csv(toy_corpus):
    cfg = ExperimentConfig(FAST, k=3, seed=4)
    rows = list(csv.DictReader(io.StringIO(run_cv(toy_corpus, cfg).fold_csv())))
    assert len(rows) == 6
    assert set(rows[0]) == {"model", "fold", "accuracy", "precision", "recall", "f1", "mcc"}
    assert {r["model"] for r in rows} == {s.name for s in FAST}


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(FAST, k=1)
    with pytest.raises(ValueError):
        ExperimentConfig((), k=3)
    with pytest.raises(ValueError):
        ExperimentConfig(FAST, resample="oversample")


# --- final model --------------------------------------------------------------

def test_train_final_carries_vocabulary(toy_corpus):
    cfg = ExperimentConfig((ModelSpec.logistic_regression(),), k=3, seed=1)
    model = train_final(toy_corpus, cfg, ModelSpec.logistic_regression())
    assert model.vocabulary is not None and len(model.vocabulary) == model.n_features
    assert model.info["resample_mode"] == "smote_tomek"
    top = top_features(model, n=3)
    assert set(top) == {lab.value for lab in Label}
    m = vectorizer.transform(model.vocabulary, toy_corpus)
    assert np.mean(predict(model, m) == m.labels) > 0.8


def test_train_final_without_resampling_uses_raw_rows(toy_corpus):
    cfg = ExperimentConfig((ModelSpec.multinomial_nb(),), resample="none", k=3)
    model = train_final(toy_corpus, cfg, ModelSpec.multinomial_nb())
    assert model.info["resample"]["link_count"] == 0
    assert sum(model.info["resample"]["synthetic_count"].values()) == 0


def test_train_final_single_class():
    d = make_corpus({Label.F: 5}, seed=0)
    cfg = ExperimentConfig((ModelSpec.logistic_regression(),), resample="none", k=2)
    with pytest.raises(SingleClassTrainingError):
        train_final(d, cfg, ModelSpec.logistic_regression())
