import itertools
import json

import numpy as np
import pytest

from reqsmote.errors import EmptyInputError, EmptyMatrixError, LengthMismatchError, UnknownClassError
from reqsmote.evaluation import (METRICS, ConfusionMatrix, aggregate, binary_mcc, confusion_matrix,
                                 format_table, metrics, multiclass_mcc, report_json)


def cm_from(counts, classes=None):
    counts = np.asarray(counts, dtype=np.int64)
    classes = classes or tuple(f"c{i}" for i in range(len(counts)))
    return ConfusionMatrix(counts, tuple(classes))


def random_matrix(rng, k=None):
    k = k or int(rng.integers(2, 13))
    C = rng.integers(0, 30, size=(k, k))
    C[rng.random((k, k)) < 0.3] = 0
    if C.sum() == 0:
        C[0, 0] = 1
    return C


def test_binary_example():
    # positive class first: rows are truth, columns predictions
    cm = cm_from([[50, 5], [5, 40]], ("pos", "neg"))
    r = metrics(cm)
    assert r.per_class["pos"]["precision"] == pytest.approx(50 / 55, abs=1e-12)
    assert r.per_class["pos"]["recall"] == pytest.approx(50 / 55, abs=1e-12)
    assert r.accuracy == pytest.approx(0.90, abs=1e-12)
    assert r.mcc == pytest.approx(1975 / 2475, abs=1e-12)


def test_binary_count_example():
    cm = confusion_matrix([1, 1, 0, 0], [1, 0, 0, 1], [1, 0])
    tp, fn, fp, tn = cm.counts[0, 0], cm.counts[0, 1], cm.counts[1, 0], cm.counts[1, 1]
    assert (tp, fn, fp, tn) == (1, 1, 1, 1)


def test_three_class_tally():
    truth = list("AAAABBBBCCCC")
    pred = list("AABCBBBACCCA")
    cm = confusion_matrix(truth, pred, "ABC")
    assert cm.counts.tolist() == [[2, 1, 1], [1, 3, 0], [1, 0, 3]]
    assert cm.total == 12
    r = metrics(cm)
    assert r.accuracy == pytest.approx(8 / 12)
    assert r.per_class["A"]["precision"] == pytest.approx(2 / 4)
    assert r.per_class["B"]["precision"] == pytest.approx(3 / 4)
    assert r.per_class["C"]["recall"] == pytest.approx(3 / 4)


def test_identity_is_diagonal_and_perfect():
    labels = ["F", "SE", "US", "F", "SE"]
    cm = confusion_matrix(labels, labels, ["F", "SE", "US"])
    assert np.array_equal(cm.counts, np.diag(np.diag(cm.counts)))
    r = metrics(cm)
    assert r.accuracy == 1 and r.mcc == 1 and r.f1 == 1
    assert all(v["f1"] == 1 for v in r.per_class.values())


def test_constant_predictor_has_zero_mcc():
    r = metrics(confusion_matrix(["a", "a", "b", "b"], ["a"] * 4, ["a", "b"]))
    assert r.mcc == 0.0
    assert r.per_class["b"]["undefined"] == ["precision"]
    assert r.per_class["b"]["precision"] == 0.0


def test_weighted_recall_equals_accuracy():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        r = metrics(cm_from(random_matrix(rng)))
        assert abs(r.recall - r.accuracy) <= 1e-12


def test_multiclass_mcc_reduces_to_binary():
    for tp, fn, fp, tn in itertools.product(range(5), repeat=4):
        if tp + fn + fp + tn == 0:
            continue
        C = np.array([[tp, fn], [fp, tn]])
        assert abs(multiclass_mcc(C) - binary_mcc(tp, tn, fp, fn)) <= 1e-12


def test_class_permutation_invariance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        C = random_matrix(rng)
        perm = rng.permutation(len(C))
        a = metrics(cm_from(C)).scalars()
        b = metrics(cm_from(C[np.ix_(perm, perm)])).scalars()
        for k in METRICS:
            assert a[k] == pytest.approx(b[k], abs=1e-12)


def test_rates_in_range_and_f1_is_harmonic_mean():
    rng = np.random.default_rng(2)
    for _ in range(200):
        r = metrics(cm_from(random_matrix(rng)))
        assert -1 <= r.mcc <= 1
        for k in ("accuracy", "precision", "recall", "f1"):
            assert 0 <= getattr(r, k) <= 1
        for v in r.per_class.values():
            if v["precision"] > 0 and v["recall"] > 0:
                hm = 2 * v["precision"] * v["recall"] / (v["precision"] + v["recall"])
                assert v["f1"] == pytest.approx(hm, abs=1e-12)


def test_errors():
    with pytest.raises(LengthMismatchError):
        confusion_matrix([1, 2], [1], [1, 2])
    with pytest.raises(UnknownClassError):
        confusion_matrix([1, 3], [1, 1], [1, 2])
    with pytest.raises(EmptyMatrixError):
        metrics(cm_from(np.zeros((2, 2))))
    with pytest.raises(EmptyInputError):
        aggregate([])


def fold(acc):
    r = metrics(cm_from([[1, 0], [0, 1]]))
    r.accuracy = acc
    return r


def test_aggregate_mean_and_sample_std():
    agg = aggregate([fold(0.7), fold(0.8)])
    assert agg.mean["accuracy"] == pytest.approx(0.75)
    assert agg.std["accuracy"] == pytest.approx(np.sqrt(0.005), abs=1e-12)
    assert agg.n_folds == 2


def test_aggregate_identical_and_single():
    assert aggregate([fold(0.6)] * 4).std["accuracy"] == 0.0
    assert aggregate([fold(0.6)]).std["accuracy"] == 0.0


def test_table_and_json():
    agg = aggregate([fold(0.7), fold(0.8)])
    text = format_table([("Logistic Regression", agg)])
    lines = text.splitlines()
    assert lines[0].startswith("Model") and "Mean MCC" in lines[0]
    assert set(lines[1]) <= {"-", " "}
    assert "75.00 ± 7.07" in lines[2]
    doc = json.loads(report_json(agg))
    assert doc["n_folds"] == 2 and set(doc["mean"]) == set(METRICS)
    r = json.loads(report_json(fold(0.5)))
    assert r["averaging"] == "weighted"
