"""Synthetic requirement sentences for tests and demos.

The generator is not a stand-in for real data. It gives each label a pool of
topical words mixed with shared boilerplate, so classifiers have something to
learn and class imbalance can be dialled in.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .corpus import Dataset, Label, RequirementRecord

TOPIC_WORDS = {
    Label.F: "display invoice order record update search report schedule enter submit account "
             "customer list view print select create delete".split(),
    Label.A: "available uptime hours day week downtime operational online outage access".split(),
    Label.L: "comply regulation law legal license policy audit contract standard privacy".split(),
    Label.LF: "color font layout screen look feel logo style appearance theme".split(),
    Label.MN: "maintain modify update code module documented change upgrade patch".split(),
    Label.O: "operate environment server interface install configure deploy platform runtime".split(),
    Label.PE: "seconds response time fast throughput latency load performance within".split(),
    Label.SC: "scale users concurrent grow capacity increase volume expand".split(),
    Label.SE: "secure password encrypt authorized access login authenticate protect breach".split(),
    Label.US: "easy intuitive learn user friendly help training clicks navigate".split(),
    Label.FT: "failure recover backup fault tolerance crash restore redundant".split(),
    Label.PO: "portable browser windows linux mobile platforms port compatible".split(),
}

SHARED = "the system shall be able to product must provide all data users application web".split()

# Rough shape of a skewed requirements corpus: one large functional class,
# a handful of mid-sized quality classes and a long tail.
SKEWED_COUNTS = {
    Label.F: 90, Label.SE: 26, Label.US: 14, Label.O: 14, Label.PE: 12, Label.LF: 10,
    Label.A: 10, Label.MN: 10, Label.SC: 10, Label.L: 10, Label.FT: 10, Label.PO: 10,
}


def make_corpus(counts: Mapping[Label, int] | None = None, seed: int = 0, topical: int = 3,
                shared: int = 4, noise: float = 0.25) -> Dataset:
    """Draw a labeled corpus.

    Parameters:
        counts: records per label (defaults to ``SKEWED_COUNTS``).
        seed: generator seed; equal seeds give equal corpora.
        topical: topic words per sentence.
        shared: boilerplate words per sentence.
        noise: chance that each topic word comes from another label's pool.
    """
    counts = counts or SKEWED_COUNTS
    rng = np.random.default_rng(seed)
    labels = list(TOPIC_WORDS)
    records = []
    for lab, n in counts.items():
        for j in range(n):
            words = list(rng.choice(SHARED, size=shared))
            for _ in range(topical):
                pool = TOPIC_WORDS[lab]
                if rng.random() < noise:
                    pool = TOPIC_WORDS[labels[rng.integers(len(labels))]]
                words.append(str(rng.choice(pool)))
            rng.shuffle(words)
            records.append(RequirementRecord(f"{lab.value}-{j}", " ".join(words).capitalize() + ".", lab))
    order = rng.permutation(len(records))
    return Dataset(records[i] for i in order)
