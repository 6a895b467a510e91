"""
Leakage-safe cross-validation
=============================

Runs stratified K-fold with and without resampling. The vectorizer is
refitted inside each fold and only training rows are resampled. Pass a CSV
path as the first argument to use real data; the toy corpus is small, so K
defaults to 5 here.
"""

import sys

from reqsmote import ExperimentConfig, ModelSpec, load_promise_csv, run_cv, stratified_kfold, train_final
from reqsmote.evaluation import format_table
from reqsmote.toy import make_corpus

if len(sys.argv) > 1:
    data, k = load_promise_csv(sys.argv[1]), 10
else:
    data, k = make_corpus(seed=0), 5

plan = stratified_kfold(data.labels, k=k, seed=42)
print("fold sizes:", [len(f) for f in plan.folds])

models = (ModelSpec.logistic_regression(C=10), ModelSpec.multinomial_nb(), ModelSpec.knn(5))
rows = []
for mode in ("none", "smote_tomek"):
    report = run_cv(data, ExperimentConfig(models, resample=mode, k=k, seed=42))
    rows += [(f"{name} [{mode}]", report.aggregates[name]) for name in report.model_names()]
    print(mode, "synthetic rows in fold 0:", sum(report.folds[0].resample.synthetic_count.values()),
          "removed:", len(report.folds[0].resample.removed_indices))
print(format_table(rows))

# Per-fold metrics for plotting.
print(report.fold_csv().splitlines()[:3])

# The deployable model is trained on everything.
final = train_final(data, ExperimentConfig(models[:1], k=k), models[0])
print(final.spec.name, len(final.classes), "classes", final.n_features, "features")
