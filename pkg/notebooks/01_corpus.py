"""
Loading a requirements corpus
=============================

Reads a labeled CSV (or draws the bundled toy corpus) and prints the class
distribution. Pass a CSV path as the first argument to use your own data,
e.g. the PROMISE_exp file.
"""

import sys

from reqsmote import class_distribution, load_promise_csv
from reqsmote.corpus import LABEL_NAMES, Label, distribution_table
from reqsmote.toy import make_corpus

if len(sys.argv) > 1:
    data = load_promise_csv(sys.argv[1])
else:
    data = make_corpus(seed=0)

print(len(data), "requirements")
print(data[0])

# Label.parse is forgiving about case and whitespace.
print(Label.parse(" se "), Label.parse("se").is_functional, Label.F.is_functional)

# Counts come back in label declaration order; empty classes are left out.
dist = class_distribution(data)
for lab, n, pct in distribution_table(dist):
    print(f"{lab.value:<3s} {n:>4d} {pct:5.1f}%  {'#' * int(pct / 2)}  {LABEL_NAMES[lab]}")

# The functional class dominates, which is the imbalance the rest of the
# pipeline deals with.
counts = sorted(dist.values())
print("largest / smallest class:", counts[-1] / counts[0])
