import csv
import os
from pathlib import Path

import pytest

from reqsmote.corpus import Label
from reqsmote.toy import make_corpus


def promise_csv_path():
    """Location of the real PROMISE_exp CSV, or None when it is not available."""
    candidates = []
    if os.environ.get("PROMISE_EXP_CSV"):
        candidates.append(Path(os.environ["PROMISE_EXP_CSV"]))
    if os.environ.get("REQSMOTE_DATA_DIR"):
        candidates.append(Path(os.environ["REQSMOTE_DATA_DIR"]) / "PROMISE_exp.csv")
    candidates.append(Path(__file__).resolve().parents[1] / "data" / "PROMISE_exp.csv")
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture(scope="session")
def toy_corpus():
    return make_corpus(seed=7)


@pytest.fixture
def write_csv(tmp_path):
    def _write(rows, header=("id", "text", "label"), name="data.csv"):
        path = tmp_path / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        return path

    return _write


@pytest.fixture
def toy_csv(tmp_path, toy_corpus):
    from reqsmote.corpus import dump_csv

    path = tmp_path / "toy.csv"
    dump_csv(toy_corpus, path)
    return path


ALL_LABELS = list(Label)
