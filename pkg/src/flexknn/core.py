"""Shared data model: labeled samples, training sets, neighbor sets, outcomes."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    NonFiniteValueError,
)


@dataclass(frozen=True)
class ClassLabel:
    id: int
    name: str


@dataclass(frozen=True)
class LabeledSample:
    """A feature vector with the name of its class.

    Integer class ids are not stored here; they are assigned by the
    ``TrainingSet`` the sample ends up in.
    """

    vector: tuple[float, ...]
    label: str

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(float(v) for v in self.vector))
        object.__setattr__(self, "label", str(self.label))

    @property
    def dimension(self) -> int:
        return len(self.vector)


def as_feature_vector(values, dimension: int | None = None) -> np.ndarray:
    """Return ``values`` as a finite 1-D float64 array.

    Raises ``DimensionMismatchError`` if ``dimension`` is given and differs,
    ``NonFiniteValueError`` on NaN or infinity.
    """
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatchError(f"expected a non-empty 1-D vector, got shape {vec.shape}")
    if dimension is not None and vec.size != dimension:
        raise DimensionMismatchError(f"vector has dimension {vec.size}, expected {dimension}")
    if not np.all(np.isfinite(vec)):
        raise NonFiniteValueError("vector contains NaN or infinite values")
    return vec


class TrainingSet:
    """Immutable labeled data set with a frozen class registry.

    Class ids are contiguous ``1..M`` and follow the order in which label
    names first appear. Use :func:`build_training_set` to construct one.

    Attributes
    ----------
    X : ndarray, shape (N, n)
        Read-only feature matrix.
    class_ids : ndarray of int, shape (N,)
        Class id of every row.
    classes : tuple of ClassLabel
        Registry, ``classes[i].id == i + 1``.
    """

    __slots__ = ("X", "class_ids", "classes", "_counts", "_by_name")

    def __init__(self, X: np.ndarray, class_ids: np.ndarray, classes: Sequence[ClassLabel]):
        X = np.array(X, dtype=np.float64, copy=True)
        class_ids = np.array(class_ids, dtype=np.int64, copy=True)
        X.setflags(write=False)
        class_ids.setflags(write=False)
        self.X = X
        self.class_ids = class_ids
        self.classes = tuple(classes)
        counts = np.bincount(class_ids, minlength=len(self.classes) + 1)[1:]
        counts.setflags(write=False)
        self._counts = counts
        self._by_name = {c.name: c for c in self.classes}

    def __len__(self) -> int:
        return self.X.shape[0]

    def __repr__(self) -> str:
        return f"TrainingSet(N={len(self)}, n={self.dimension}, M={self.n_classes})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrainingSet):
            return NotImplemented
        return (
            self.classes == other.classes
            and np.array_equal(self.class_ids, other.class_ids)
            and np.array_equal(self.X, other.X)
        )

    __hash__ = None

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def counts(self) -> np.ndarray:
        """Per-class sample counts indexed by ``class_id - 1``."""
        return self._counts

    @property
    def class_counts(self) -> dict[str, int]:
        return {c.name: int(self._counts[c.id - 1]) for c in self.classes}

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    @property
    def samples(self) -> list[LabeledSample]:
        names = self.class_names
        return [
            LabeledSample(tuple(row), names[cid - 1])
            for row, cid in zip(self.X.tolist(), self.class_ids.tolist())
        ]

    def label(self, class_id: int) -> ClassLabel:
        return self.classes[class_id - 1]

    def label_of(self, index: int) -> ClassLabel:
        return self.classes[int(self.class_ids[index]) - 1]

    def class_by_name(self, name: str) -> ClassLabel:
        return self._by_name[name]

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def without_classes(self, names: Iterable[str]) -> "TrainingSet":
        """Rebuild the set with every sample of the named classes removed."""
        drop = set(names)
        keep = [s for s in self.samples if s.label not in drop]
        return build_training_set(keep)

    def map(self, fn) -> "TrainingSet":
        """Apply ``fn`` to the feature matrix, keeping labels and registry."""
        return TrainingSet(fn(self.X), self.class_ids, self.classes)


def build_training_set(samples: Iterable[LabeledSample]) -> TrainingSet:
    """Validate ``samples`` and freeze them into a :class:`TrainingSet`."""
    samples = list(samples)
    if not samples:
        raise EmptyDatasetError("training set needs at least one sample")
    n = samples[0].dimension
    if n < 1:
        raise DimensionMismatchError("sample 0 has no features", index=0)
    rows = []
    names: dict[str, int] = {}
    ids = []
    for i, s in enumerate(samples):
        if s.dimension != n:
            raise DimensionMismatchError(
                f"sample {i} has dimension {s.dimension}, expected {n}", index=i
            )
        if not all(np.isfinite(s.vector)):
            raise NonFiniteValueError(f"sample {i} contains NaN or infinite values", index=i)
        cid = names.setdefault(s.label, len(names) + 1)
        ids.append(cid)
        rows.append(s.vector)
    classes = [ClassLabel(cid, name) for name, cid in names.items()]
    return TrainingSet(np.array(rows, dtype=np.float64), np.array(ids), classes)


def training_set_from_arrays(X, labels) -> TrainingSet:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if len(labels) != X.shape[0]:
        raise DimensionMismatchError("labels and feature rows differ in length")
    return build_training_set(LabeledSample(tuple(r), str(l)) for r, l in zip(X.tolist(), labels))


@dataclass(frozen=True)
class NeighborSet:
    """Neighbors of one query, ordered by (distance, training index)."""

    indices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        dist = np.asarray(self.distances, dtype=np.float64)
        if idx.shape != dist.shape or idx.ndim != 1:
            raise ValueError("indices and distances must be 1-D and equally long")
        idx.setflags(write=False)
        dist.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "distances", dist)

    @property
    def k(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return self.k

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.distances.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, NeighborSet):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.distances, other.distances
        )

    __hash__ = None


class RejectionReason(str, enum.Enum):
    NO_NEIGHBORS_WITHIN_RADIUS = "no_neighbors_within_radius"
    BELOW_MIN_K = "below_min_k"


@dataclass(frozen=True)
class ClassificationOutcome:
    """Result of classifying one query.

    ``label`` is None exactly when the query was rejected. ``votes`` maps
    class ids to raw counts (majority), normalized weights (inverse distance)
    or per-class ratios (class ratio), and is empty for ``K=0``.
    """

    label: ClassLabel | None
    k_found: int
    votes: dict = field(default_factory=dict)
    rejection: RejectionReason | None = None

    @property
    def rejected(self) -> bool:
        return self.label is None

    @property
    def label_name(self) -> str | None:
        return None if self.label is None else self.label.name
