"""
Classifiers
===========

Trains the five classifier families on a balanced TF-IDF matrix, compares
their training fit, and looks at logistic regression coefficients.
"""

import numpy as np

from reqsmote import ModelSpec, SmoteParams, fit_transform, predict, predict_proba, smote_tomek, top_features, train
from reqsmote.models import load, save
from reqsmote.toy import make_corpus

vocab, X = fit_transform(make_corpus(seed=0))
X_bal, _ = smote_tomek(X, SmoteParams(5, 42))

specs = [ModelSpec.logistic_regression(C=10), ModelSpec.linear_svm(), ModelSpec.multinomial_nb(),
         ModelSpec.knn(5), ModelSpec.decision_tree()]
models = {}
for spec in specs:
    models[spec.name] = model = train(spec, X_bal, seed=0)
    acc = np.mean(predict(model, X) == X.labels)
    print(f"{spec.name:<20s} training accuracy on original rows {acc:.3f}")

lr = models["Logistic Regression"]
print("LR converged:", lr.info["converged"], "after", lr.info["epochs"], "epochs")

# Probabilities exist for LR and NB; rows sum to one.
P = predict_proba(lr, X.rows[:3])
print(np.round(P, 3), P.sum(axis=1))

# Largest positive coefficients per class.
for cls, terms in top_features(lr, vocab, n=4).items():
    print(cls, [t for t, _ in terms])

# Saved models are plain JSON and predict the same after loading.
save(lr, "/tmp/lr_model.json")
again = load("/tmp/lr_model.json")
print("round trip identical:", np.array_equal(predict(again, X), predict(lr, X)))
