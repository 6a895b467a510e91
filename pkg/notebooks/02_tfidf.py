"""
TF-IDF features
===============

Fits a vocabulary, turns sentences into L2-normalised TF-IDF rows and maps a
row back to its terms.
"""

import numpy as np

from reqsmote import TfidfConfig, fit, nonzero_terms, transform
from reqsmote.toy import make_corpus

data = make_corpus(seed=0)

vocab = fit(data)
X = transform(vocab, data)
print(len(vocab), "terms,", X.rows.shape, "matrix")
print("density:", np.count_nonzero(X.rows) / X.rows.size)

# Rare terms get a larger idf: ln((1 + N) / (1 + df)) + 1.
order = np.argsort(vocab.idf)
print("most common:", [vocab.terms[j] for j in order[:5]])
print("rarest:     ", [vocab.terms[j] for j in order[-5:]])

# Rows have unit length unless no known term occurs.
print("row norms:", np.round(np.linalg.norm(X.rows[:5], axis=1), 12))

# A new sentence uses the fitted vocabulary; unseen words are dropped.
new = transform(vocab, ["The system shall encrypt every password within seconds"])
print(nonzero_terms(vocab, new.rows[0]))

# Tokenizer settings are part of the vocabulary and travel with it.
cfg = TfidfConfig(stop_words=frozenset({"the", "shall", "system"}), min_df=2)
small = fit(data, cfg)
print(len(small), "terms with stop words removed and min_df=2")
print(small.dumps().splitlines()[:4])
