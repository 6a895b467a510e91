import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqsmote.errors import EmptyMatrixError, StaleLinksError
from reqsmote.resampler import (SmoteParams, TomekLink, find_tomek_links, nearest_neighbors,
                                remove_tomek_majority, smote_oversample, smote_tomek)
from reqsmote.vectorizer import SYNTHETIC, FeatureMatrix


def fm(points, labels):
    return FeatureMatrix.from_arrays(np.asarray(points, dtype=float), labels)


def brute_force_links(X, labels):
    """All-pairs mutual 1-NN with exact distances; ties go to the lowest index."""
    n = len(X)
    nn = []
    for i in range(n):
        best, best_d = None, None
        for j in range(n):
            if j == i:
                continue
            d = sum((a - b) ** 2 for a, b in zip(X[i], X[j]))
            if best_d is None or d < best_d:
                best, best_d = j, d
        nn.append(best)
    return {(i, j) for i, j in enumerate(nn) if i < j and nn[j] == i and labels[i] != labels[j]}


def find_parents(s, X):
    """Brute-force search for a pair (a, b) with s on the segment from X[a] to X[b]."""
    for a in range(len(X)):
        for b in range(len(X)):
            d = X[b] - X[a]
            dd = float(d @ d)
            lam = 0.0 if dd == 0 else float((s - X[a]) @ d / dd)
            if -1e-12 <= lam <= 1 + 1e-12 and np.allclose(X[a] + lam * d, s, rtol=0, atol=1e-12):
                return a, b
    return None


def random_dataset(rng, n_max=50, grid=False):
    n = int(rng.integers(2, n_max + 1))
    X = rng.integers(0, 6, size=(n, 2)).astype(float) if grid else rng.random((n, 2))
    labels = rng.choice(["F", "SE", "PO"], size=n, p=[0.6, 0.3, 0.1])
    return X, labels


# --- Tomek links -------------------------------------------------------------

def test_tomek_example_three_points():
    m = fm([(0, 0), (0.2, 0), (1, 0)], ["F", "SE", "F"])
    links = find_tomek_links(m)
    assert [(l.index_a, l.index_b) for l in links] == [(0, 1)]
    assert (links[0].label_a, links[0].label_b) == ("F", "SE")


def test_tomek_separated_clusters_have_no_links():
    rng = np.random.default_rng(0)
    a = rng.normal(0, 0.1, size=(10, 2))
    b = rng.normal(10, 0.1, size=(10, 2))
    X = np.vstack([a, b])
    labels = ["F"] * 10 + ["SE"] * 10
    assert brute_force_links(X.tolist(), labels) == set()
    assert find_tomek_links(fm(X, labels)) == []


def test_tomek_coincident_points():
    m = fm([(1, 1), (1, 1)], ["F", "PO"])
    assert [(l.index_a, l.index_b) for l in find_tomek_links(m)] == [(0, 1)]


@pytest.mark.parametrize("grid", [False, True])
def test_tomek_matches_brute_force(grid):
    rng = np.random.default_rng(11 + grid)
    for _ in range(100):
        X, labels = random_dataset(rng, grid=grid)
        got = {(l.index_a, l.index_b) for l in find_tomek_links(fm(X, labels))}
        assert got == brute_force_links(X.tolist(), list(labels))


def test_nearest_neighbors_tie_goes_to_lowest_index():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
    assert nearest_neighbors(X, 1)[0, 0] == 1
    assert list(nearest_neighbors(X, 3)[0]) == [1, 2, 3]


# --- SMOTE --------------------------------------------------------------------

def test_smote_example_counts_and_betweenness():
    rng = np.random.default_rng(5)
    X = rng.random((13, 3))
    labels = ["F"] * 10 + ["SE"] * 3
    out = smote_oversample(fm(X, labels), SmoteParams(5, 99))
    assert Counter(out.labels.tolist()) == {"F": 10, "SE": 10}
    new = np.flatnonzero(out.is_synthetic)
    assert len(new) == 7
    B = X[10:]
    for r in new:
        s = out.rows[r]
        assert find_parents(s, B) is not None
        assert out.labels[r] == "SE"


def test_smote_lambda_endpoints():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [6.0, 5.0], [7.0, 5.0]])
    labels = ["SE", "SE", "F", "F", "F"]
    zero = smote_oversample(fm(X, labels), SmoteParams(1, 0), lambdas=[0.0])
    one = smote_oversample(fm(X, labels), SmoteParams(1, 0), lambdas=[1.0])
    s0, s1 = zero.rows[-1], one.rows[-1]
    # with k=1 the neighbour of row 0 is row 1 and vice versa
    assert any(np.array_equal(s0, X[i]) for i in (0, 1))
    assert not np.array_equal(s0, s1)
    assert {tuple(s0), tuple(s1)} == {(0.0, 0.0), (1.0, 0.0)}


def test_smote_rejects_empty():
    with pytest.raises(EmptyMatrixError):
        smote_oversample(FeatureMatrix(np.zeros((0, 2)), [], []))


def test_smote_single_row_class_is_duplicated(caplog):
    X = np.array([[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [9.0, 9.0]])
    out = smote_oversample(fm(X, ["F", "F", "F", "SE"]))
    assert "single row" in caplog.text
    synth = out.rows[out.is_synthetic]
    assert synth.shape == (2, 2) and np.all(synth == [9.0, 9.0])


def test_smote_balanced_input_unchanged():
    X = np.arange(8.0).reshape(4, 2)
    out = smote_oversample(fm(X, ["F", "SE", "F", "SE"]))
    assert np.array_equal(out.rows, X) and not out.is_synthetic.any()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_smote_properties(seed, k):
    rng = np.random.default_rng(seed)
    X, labels = random_dataset(rng, grid=bool(seed % 2))
    m = fm(X, labels)
    before = m.rows.copy()
    out = smote_oversample(m, SmoteParams(k, seed))
    counts = Counter(out.labels.tolist())
    assert max(counts.values()) == min(counts.values())
    n = len(m)
    assert np.array_equal(out.rows[:n], before)
    assert np.array_equal(out.row_origin[:n], np.arange(n))
    assert np.all(out.row_origin[n:] == SYNTHETIC)
    majority = Counter(labels.tolist()).most_common()
    top = {c for c, v in majority if v == majority[0][1]}
    assert not set(out.labels[n:].tolist()) & top


def test_smote_deterministic():
    rng = np.random.default_rng(1)
    X, labels = random_dataset(rng)
    a = smote_oversample(fm(X, labels), SmoteParams(3, 42))
    b = smote_oversample(fm(X, labels), SmoteParams(3, 42))
    assert a.rows.tobytes() == b.rows.tobytes()


# --- removal ------------------------------------------------------------------

def test_remove_majority_member():
    m = FeatureMatrix(np.zeros((13, 1)), ["F"] * 10 + ["SE"] * 3, np.arange(13))
    out, rep = remove_tomek_majority(m, [TomekLink(0, 12, "F", "SE")])
    assert rep.removed_indices == [0] and rep.link_count == 1
    assert len(out) == 12 and list(out.row_origin) == list(range(1, 13))


def test_remove_empty_links():
    m = fm(np.eye(3), ["F", "SE", "F"])
    out, rep = remove_tomek_majority(m, [])
    assert np.array_equal(out.rows, m.rows)
    assert rep.removed_indices == [] and rep.link_count == 0


def test_remove_tie_drops_both():
    m = FeatureMatrix(np.zeros((10, 1)), ["F"] * 5 + ["SE"] * 5, np.arange(10))
    out, rep = remove_tomek_majority(m, [TomekLink(2, 7, "F", "SE")])
    assert rep.removed_indices == [2, 7]
    assert Counter(out.labels.tolist()) == {"F": 4, "SE": 4}


def test_remove_counts_use_original_rows_only():
    # after SMOTE both classes have 3 rows but the original split was 3:1
    m = FeatureMatrix(np.zeros((6, 1)), ["F", "F", "F", "SE", "SE", "SE"], [0, 1, 2, 3, SYNTHETIC, SYNTHETIC])
    _, rep = remove_tomek_majority(m, [TomekLink(1, 4, "F", "SE")])
    assert rep.removed_indices == [1]


def test_remove_row_in_several_links_once():
    m = FeatureMatrix(np.zeros((5, 1)), ["F", "F", "F", "SE", "A"], np.arange(5))
    _, rep = remove_tomek_majority(m, [TomekLink(0, 3, "F", "SE"), TomekLink(0, 4, "F", "A")])
    assert rep.removed_indices == [0]


def test_stale_links():
    m = fm(np.eye(2), ["F", "SE"])
    with pytest.raises(StaleLinksError):
        remove_tomek_majority(m, [TomekLink(0, 5, "F", "SE")])


# --- combined pass ------------------------------------------------------------

def test_smote_tomek_balanced_separated_is_identity():
    rng = np.random.default_rng(2)
    X = np.vstack([rng.normal(0, 0.1, (8, 2)), rng.normal(5, 0.1, (8, 2))])
    m = fm(X, ["F"] * 8 + ["SE"] * 8)
    out, rep = smote_tomek(m)
    assert np.array_equal(out.rows, X)
    assert rep.removed_indices == [] and rep.link_count == 0 and sum(rep.synthetic_count.values()) == 0


def test_smote_tomek_composition_and_report_arithmetic():
    rng = np.random.default_rng(4)
    X = np.vstack([rng.normal(0, 1, (10, 2)), rng.normal(0.5, 1, (3, 2))])
    m = fm(X, ["F"] * 10 + ["SE"] * 3)
    p = SmoteParams(5, 17)
    out, rep = smote_tomek(m, p)
    balanced = smote_oversample(m, p)
    links = find_tomek_links(balanced)
    expected, _ = remove_tomek_majority(balanced, links, {"F": 10, "SE": 3})
    assert out.rows.tobytes() == expected.rows.tobytes()
    assert rep.synthetic_count == {"F": 0, "SE": 7}
    assert len(out) == 20 - len(rep.removed_indices)
    members = {i for l in links for i in (l.index_a, l.index_b)}
    assert set(rep.removed_indices) <= members
    counts = Counter(out.labels.tolist())
    assert counts["SE"] == 10
    assert counts["F"] == 10 - len(rep.removed_indices)


def test_smote_tomek_deterministic_and_json():
    rng = np.random.default_rng(8)
    X, labels = random_dataset(rng)
    a, ra = smote_tomek(fm(X, labels), SmoteParams(5, 1))
    b, rb = smote_tomek(fm(X, labels), SmoteParams(5, 1))
    assert a.rows.tobytes() == b.rows.tobytes()
    assert ra.to_json() == rb.to_json()
    assert set(json.loads(ra.to_json())) == {"synthetic_count", "removed_indices", "link_count"}


def test_fold_seed_derivation():
    assert SmoteParams(5, 42).for_fold(3).rng_seed == 42 ^ 3
