"""
Metrics
=======

Confusion matrices, weighted precision / recall / F1 and MCC, then
aggregation over folds.
"""

import numpy as np

from reqsmote import aggregate, confusion_matrix, metrics
from reqsmote.evaluation import ConfusionMatrix, format_table

# Binary example: 50 true positives, 40 true negatives, 5 of each error.
cm = ConfusionMatrix(np.array([[50, 5], [5, 40]]), ("pos", "neg"))
r = metrics(cm)
print("precision(pos)", r.per_class["pos"]["precision"], "accuracy", r.accuracy, "mcc", r.mcc)

# Weighted recall is the same number as accuracy, always.
truth = list("AAAABBBBCCCC")
pred = list("AABCBBBACCCA")
cm = confusion_matrix(truth, pred, "ABC")
print(cm.counts)
r = metrics(cm)
print("accuracy", r.accuracy, "weighted recall", r.recall)

# A class that is never predicted has an undefined precision, reported as 0.
r = metrics(confusion_matrix(["a", "a", "b", "b"], ["a"] * 4, ["a", "b"]))
print(r.per_class["b"], "mcc", r.mcc)

# Fold reports aggregate to mean and sample standard deviation.
rng = np.random.default_rng(0)
folds = []
for _ in range(10):
    C = np.diag(rng.integers(5, 10, 3)) + rng.integers(0, 3, (3, 3))
    folds.append(metrics(ConfusionMatrix(C, ("A", "B", "C"))))
print(format_table([("random folds", aggregate(folds))]))
