"""CSV datasets and z-score normalization.

Dataset files are UTF-8 CSV with a header ``f1,...,fn,label``: one column
per feature followed by the class name. Features are written with 17
significant digits so a write/read round trip is lossless.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import LabeledSample, TrainingSet, build_training_set
from .errors import (
    DimensionMismatchError,
    MalformedHeaderError,
    MissingLabelError,
    NonNumericFeatureError,
    RaggedRowError,
)

LABEL_COLUMN = "label"


def _parse(lines, path=None) -> list[LabeledSample]:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeaderError("file is empty", line=1, path=path) from None
    header = [h.strip() for h in header]
    if len(header) < 2 or header[-1] != LABEL_COLUMN:
        raise MalformedHeaderError(
            f"header must list at least one feature column followed by '{LABEL_COLUMN}'",
            line=1,
            path=path,
        )
    if any(not h for h in header[:-1]):
        raise MalformedHeaderError("empty feature column name", line=1, path=path)
    n = len(header) - 1

    samples = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != n + 1:
            raise RaggedRowError(
                f"expected {n + 1} fields, found {len(row)}", line=line, path=path
            )
        values = []
        for j, cell in enumerate(row[:n]):
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericFeatureError(
                    f"feature {header[j]!r} is not a number: {cell!r}",
                    line=line,
                    column=j + 1,
                    path=path,
                ) from None
            if not math.isfinite(v):
                raise NonNumericFeatureError(
                    f"feature {header[j]!r} is not finite: {cell!r}",
                    line=line,
                    column=j + 1,
                    path=path,
                )
            values.append(v)
        label = row[n].strip()
        if not label:
            raise MissingLabelError("label is empty", line=line, column=n + 1, path=path)
        samples.append(LabeledSample(tuple(values), label))
    return samples


def read_dataset(source) -> list[LabeledSample]:
    """Read labeled samples from a path or an open text stream."""
    if hasattr(source, "read"):
        return _parse(source)
    path = Path(source)
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse(fh, path=path)


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def write_dataset(samples, target) -> None:
    """Write samples (or a ``TrainingSet``) to a path or an open text stream."""
    if isinstance(samples, TrainingSet):
        samples = samples.samples
    samples = list(samples)
    if not samples:
        raise ValueError("nothing to write")
    n = samples[0].dimension
    if hasattr(target, "write"):
        _write(samples, n, target)
    else:
        with open(target, "w", newline="", encoding="utf-8") as fh:
            _write(samples, n, fh)


def _write(samples, n, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"f{j + 1}" for j in range(n)] + [LABEL_COLUMN])
    for i, s in enumerate(samples):
        if s.dimension != n:
            raise DimensionMismatchError(f"sample {i} has dimension {s.dimension}, expected {n}", index=i)
        writer.writerow([format_float(v) for v in s.vector] + [s.label])


def dataset_to_string(samples) -> str:
    buf = io.StringIO()
    write_dataset(samples, buf)
    return buf.getvalue()


def as_arrays(samples) -> tuple[np.ndarray, list[str]]:
    """Stack samples into a feature matrix and a list of label names."""
    if isinstance(samples, TrainingSet):
        samples = samples.samples
    samples = list(samples)
    X = np.array([s.vector for s in samples], dtype=np.float64)
    return X, [s.label for s in samples]


@dataclass(frozen=True)
class NormalizationParams:
    """Per-dimension mean and population standard deviation."""

    mean: tuple[float, ...]
    std: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "std", tuple(float(v) for v in self.std))
        if len(self.mean) != len(self.std):
            raise DimensionMismatchError("mean and std differ in length")
        if any(s < 0 or not math.isfinite(s) for s in self.std):
            raise ValueError("standard deviations must be finite and non-negative")

    @property
    def dimension(self) -> int:
        return len(self.mean)

    def to_json(self) -> str:
        return json.dumps({"mean": list(self.mean), "std": list(self.std)}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "NormalizationParams":
        obj = json.loads(text)
        return cls(obj["mean"], obj["std"])

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "NormalizationParams":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def fit_normalization(train) -> NormalizationParams:
    """Fit z-score parameters on a training set (or a feature matrix)."""
    X = train.X if isinstance(train, TrainingSet) else np.asarray(train, dtype=np.float64)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    # a constant column must get an exact zero, not rounding residue
    const = np.ptp(X, axis=0) == 0
    mean[const] = X[0, const]
    std[const] = 0.0
    return NormalizationParams(mean, std)


def normalize_array(params: NormalizationParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != params.dimension:
        raise DimensionMismatchError(
            f"data has dimension {X.shape[-1]}, parameters have {params.dimension}"
        )
    mean = np.array(params.mean)
    std = np.array(params.std)
    out = np.zeros_like(X)
    np.divide(X - mean, std, out=out, where=std != 0)
    return out


def apply_normalization(params: NormalizationParams, samples):
    """Z-score ``samples`` with ``params``; zero-variance dimensions become 0.

    Accepts a ``TrainingSet`` (returns one with the same registry), a list of
    ``LabeledSample`` (returns a list), or a bare array.
    """
    if isinstance(samples, TrainingSet):
        return samples.map(lambda X: normalize_array(params, X))
    if isinstance(samples, np.ndarray):
        return normalize_array(params, samples)
    samples = list(samples)
    if not samples:
        return []
    X, labels = as_arrays(samples)
    Z = normalize_array(params, X)
    return [LabeledSample(tuple(row), lab) for row, lab in zip(Z.tolist(), labels)]


def load_training_set(path) -> TrainingSet:
    return build_training_set(read_dataset(path))
