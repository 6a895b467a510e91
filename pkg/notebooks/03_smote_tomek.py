"""
SMOTE-Tomek on TF-IDF rows
==========================

Oversamples every class up to the majority count, then drops the majority
member of each Tomek link. Synthetic rows are interpolations, not sentences;
listing their nonzero terms shows what they look like.
"""

from collections import Counter

import numpy as np

from reqsmote import SmoteParams, find_tomek_links, fit_transform, smote_oversample, smote_tomek
from reqsmote.corpus import LABEL_NAMES, Label
from reqsmote.vectorizer import FeatureMatrix, nonzero_terms
from reqsmote.toy import make_corpus

# A 2-D picture first: three points on a line, two labels.
m = FeatureMatrix.from_arrays([[0.0, 0.0], [0.2, 0.0], [1.0, 0.0]], ["F", "SE", "F"])
print(find_tomek_links(m))

# Interpolation with fixed lambdas makes the endpoints visible.
pts = FeatureMatrix.from_arrays([[0, 0], [1, 0], [5, 5], [6, 5], [7, 5]], ["SE", "SE", "F", "F", "F"])
for lam in (0.0, 0.5, 1.0):
    print(lam, smote_oversample(pts, SmoteParams(k_neighbors=1, rng_seed=0), lambdas=[lam]).rows[-1])

# Now the text corpus.
vocab, X = fit_transform(make_corpus(seed=0))
print("before:", dict(Counter(X.labels.tolist())))

balanced = smote_oversample(X, SmoteParams(5, 42))
print("after SMOTE:", dict(Counter(balanced.labels.tolist())))

cleaned, report = smote_tomek(X, SmoteParams(5, 42))
print("after SMOTE-Tomek:", dict(Counter(cleaned.labels.tolist())))
print(report.to_json())

# Original rows keep their index; synthetic ones are marked -1.
print(cleaned.row_origin[:5], cleaned.row_origin[-5:])

# Four synthetic rows, printed as sorted term lists.
rng = np.random.default_rng(0)
for r in np.sort(rng.choice(np.flatnonzero(cleaned.is_synthetic), 4, replace=False)):
    lab = Label(cleaned.labels[r])
    print(", ".join(nonzero_terms(vocab, cleaned.rows[r])), "->", LABEL_NAMES[lab])
