"""Training-data container and its CSV wire format.

CSV layout: header row with the feature names followed by ``label``; one
row per example. Binary tasks use labels in {0, 1}, regression tasks any
finite real.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np


class LearnerError(Exception):
    pass


class EmptyDataset(LearnerError):
    pass


class SchemaMismatch(LearnerError):
    pass


class DegenerateLabels(LearnerError):
    pass


class TaskType(str, enum.Enum):
    BINARY_CLASS = "binary_class"
    REGRESSION = "regression"


@dataclass(frozen=True)
class Dataset:
    schema_id: str
    feature_names: tuple[str, ...]
    x: np.ndarray  # (n_rows, n_features)
    y: np.ndarray  # (n_rows,)
    task: TaskType

    def __post_init__(self):
        if self.x.ndim != 2 or len(self.x) != len(self.y):
            raise EmptyDataset("feature matrix and labels disagree")
        if self.x.shape[1] != len(self.feature_names):
            raise SchemaMismatch(
                f"{self.x.shape[1]} columns vs {len(self.feature_names)} names"
            )
        if len(self.x) == 0:
            raise EmptyDataset("no rows")
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.y)):
            raise ValueError("non-finite entries in dataset")
        if self.task == TaskType.BINARY_CLASS and not set(np.unique(self.y)) <= {0.0, 1.0}:
            raise ValueError("binary task labels must be 0 or 1")

    @property
    def n_features(self) -> int:
        return self.x.shape[1]


def dataset_to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*data.feature_names, "label"])
    for row, label in zip(data.x, data.y):
        writer.writerow([repr(float(v)) for v in row] + [repr(float(label))])
    return buf.getvalue()


def dataset_from_csv(text: str, schema_id: str, task: TaskType) -> Dataset:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("empty CSV") from None
    if not header or header[-1] != "label":
        raise SchemaMismatch("last CSV column must be 'label'")
    names = tuple(header[:-1])
    if not names:
        raise SchemaMismatch("no feature columns")

    rows, labels = [], []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise SchemaMismatch(f"row {line_no} has {len(row)} fields")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise SchemaMismatch(f"row {line_no}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise SchemaMismatch(f"row {line_no}: non-finite value")
        rows.append(vals[:-1])
        labels.append(vals[-1])
    if not rows:
        raise EmptyDataset("CSV has a header but no rows")
    return Dataset(
        schema_id=schema_id,
        feature_names=names,
        x=np.array(rows),
        y=np.array(labels),
        task=task,
    )
