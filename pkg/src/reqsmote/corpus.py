"""Requirement records and PROMISE-format CSV ingestion."""

from __future__ import annotations

import csv
import enum
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import EmptyDatasetError, MissingColumnError, UnknownLabelError


class Label(str, enum.Enum):
    """Requirement type codes. ``F`` is functional, every other code is not."""

    F = "F"
    A = "A"
    L = "L"
    LF = "LF"
    MN = "MN"
    O = "O"  # noqa: E741
    PE = "PE"
    SC = "SC"
    SE = "SE"
    US = "US"
    FT = "FT"
    PO = "PO"

    @property
    def is_functional(self) -> bool:
        return self is Label.F

    @classmethod
    def parse(cls, raw: str) -> "Label":
        code = raw.strip().upper()
        try:
            return cls(code)
        except ValueError:
            raise UnknownLabelError(f"unknown label {raw!r}") from None

    def __str__(self) -> str:
        return self.value


LABEL_NAMES = {
    Label.F: "Functional",
    Label.A: "Availability",
    Label.L: "Legal",
    Label.LF: "Look-and-Feel",
    Label.MN: "Maintainability",
    Label.O: "Operability",
    Label.PE: "Performance",
    Label.SC: "Scalability",
    Label.SE: "Security",
    Label.US: "Usability",
    Label.FT: "Fault Tolerance",
    Label.PO: "Portability",
}


@dataclass(frozen=True)
class RequirementRecord:
    id: str
    text: str
    label: Label

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError(f"record {self.id!r} has empty text")


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of records. Row index is the identity used by fold plans."""

    records: tuple[RequirementRecord, ...]

    def __init__(self, records: Iterable[RequirementRecord]):
        object.__setattr__(self, "records", tuple(records))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RequirementRecord]:
        return iter(self.records)

    def __getitem__(self, i: int) -> RequirementRecord:
        return self.records[i]

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.records]

    @property
    def labels(self) -> list[Label]:
        return [r.label for r in self.records]

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(self.records[i] for i in indices)


@dataclass(frozen=True)
class CsvSchema:
    """Column mapping onto the canonical ``id,text,label`` layout.

    ``id_column`` may be None, in which case the 0-based data row number is used.
    Each field also accepts a tuple of alternative header names; the first one
    present in the file wins.
    """

    text_column: str | tuple[str, ...] = "text"
    label_column: str | tuple[str, ...] = "label"
    id_column: str | tuple[str, ...] | None = "id"
    strip_quotes: bool = False


CANONICAL_SCHEMA = CsvSchema()

# Published PROMISE_exp CSV exports use ProjectID / RequirementText / _class_
# (some mirrors drop the underscores or lowercase the names).
PROMISE_EXP_SCHEMA = CsvSchema(
    text_column=("RequirementText", "requirementtext", "text", "requirement"),
    label_column=("_class_", "class", "Class", "label"),
    id_column=("ProjectID", "projectid", "project_id", "id"),
    strip_quotes=True,
)


def _pick(header: Sequence[str], wanted, role: str, required: bool = True) -> int | None:
    if wanted is None:
        return None
    names = (wanted,) if isinstance(wanted, str) else tuple(wanted)
    stripped = [h.strip() for h in header]
    for name in names:
        if name in stripped:
            return stripped.index(name)
    if required:
        raise MissingColumnError(f"{role} column {names[0]!r} not found in header {stripped}")
    return None


def _unquote(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] == "'":
        return s[1:-1]
    return s


def load_promise_csv(path, schema: CsvSchema | str = "auto") -> Dataset:
    """Read a requirements CSV into a :class:`Dataset`, preserving file order.

    Parameters:
        path: CSV file (UTF-8, header row required).
        schema: a :class:`CsvSchema`, or ``"canonical"``, ``"promise"`` or
            ``"auto"`` (canonical header if present, otherwise PROMISE_exp).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: no header row") from None

        if schema == "auto":
            names = {h.strip() for h in header}
            schema = CANONICAL_SCHEMA if {"text", "label"} <= names else PROMISE_EXP_SCHEMA
        elif schema == "canonical":
            schema = CANONICAL_SCHEMA
        elif schema == "promise":
            schema = PROMISE_EXP_SCHEMA

        ti = _pick(header, schema.text_column, "text")
        li = _pick(header, schema.label_column, "label")
        ii = _pick(header, schema.id_column, "id", required=False)

        records = []
        for row_no, row in enumerate(reader):
            if not row or all(not c.strip() for c in row):
                continue
            # header is line 1 of the file
            line = reader.line_num
            try:
                label = Label.parse(_unquote(row[li]) if schema.strip_quotes else row[li])
            except UnknownLabelError:
                raise UnknownLabelError(f"{path}: line {line}: unknown label {row[li]!r}") from None
            except IndexError:
                raise MissingColumnError(f"{path}: line {line}: row has {len(row)} fields") from None
            text = row[ti]
            if schema.strip_quotes:
                text = _unquote(text)
            rid = row[ii].strip() if ii is not None else str(row_no)
            if not text.strip():
                raise ValueError(f"{path}: line {line}: empty requirement text")
            records.append(RequirementRecord(rid, text, label))

    if not records:
        raise EmptyDatasetError(f"{path}: header only, no data rows")
    return Dataset(records)


def dump_csv(dataset: Dataset, path) -> None:
    """Write ``dataset`` in the canonical ``id,text,label`` layout."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "text", "label"])
        for r in dataset:
            w.writerow([r.id, r.text, r.label.value])


def class_distribution(d: Dataset | Iterable[Label]) -> dict[Label, int]:
    """Label counts in :class:`Label` declaration order; absent labels are omitted."""
    labels = d.labels if isinstance(d, Dataset) else list(d)
    counts = Counter(Label(lab) for lab in labels)
    return {lab: counts[lab] for lab in Label if counts[lab]}


def distribution_table(dist: Mapping[Label, int]) -> list[tuple[Label, int, float]]:
    total = sum(dist.values())
    return [(lab, n, 100.0 * n / total) for lab, n in dist.items()]
