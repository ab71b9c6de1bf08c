"""Distance functions between feature vectors.

All kernels accumulate one dimension at a time in ascending order, so a
distance computed for one pair is bit-identical to the same pair computed
inside a batch, and ``distance(a, b) == distance(b, a)`` exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TrainingSet, as_feature_vector
from .errors import DimensionMismatchError

KINDS = ("euclidean", "manhattan", "minkowski", "canberra")


@dataclass(frozen=True)
class Metric:
    """A distance function. ``p`` is used by Minkowski only."""

    kind: str = "euclidean"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "minkowski":
            if self.p is None or not math.isfinite(self.p) or self.p <= 0:
                raise ValueError("minkowski metric needs a finite p > 0")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise ValueError(f"{self.kind} metric takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "Metric":
        """Parse ``euclidean``, ``manhattan``, ``canberra`` or ``minkowski:<p>``."""
        name, _, arg = text.strip().lower().partition(":")
        if name == "minkowski":
            if not arg:
                raise ValueError("minkowski needs a parameter, e.g. minkowski:3")
            try:
                p = float(arg)
            except ValueError:
                raise ValueError(f"invalid minkowski parameter {arg!r}") from None
            return cls("minkowski", p)
        if arg:
            raise ValueError(f"{name} metric takes no parameter")
        return cls(name)

    def __str__(self) -> str:
        return f"minkowski:{self.p:g}" if self.kind == "minkowski" else self.kind

    @property
    def is_true_metric(self) -> bool:
        """Whether the triangle inequality is guaranteed."""
        return self.kind != "minkowski" or self.p >= 1


EUCLIDEAN = Metric("euclidean")
MANHATTAN = Metric("manhattan")
CANBERRA = Metric("canberra")


def minkowski(p: float) -> Metric:
    return Metric("minkowski", p)


def _accumulate(metric: Metric, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # A has shape (..., n) broadcastable against B of shape (N, n)
    n = B.shape[-1]
    shape = np.broadcast_shapes(A[..., 0].shape, B[..., 0].shape)
    acc = np.zeros(shape, dtype=np.float64)
    kind = metric.kind
    for j in range(n):
        diff = A[..., j] - B[..., j]
        if kind == "euclidean":
            acc += diff * diff
        elif kind == "manhattan":
            acc += np.abs(diff)
        elif kind == "minkowski":
            acc += np.abs(diff) ** metric.p
        else:
            den = np.abs(A[..., j]) + np.abs(B[..., j])
            num = np.abs(diff)
            # both coordinates zero: the term is defined as 0
            acc += np.divide(num, den, out=np.zeros(shape), where=den != 0)
    if kind == "euclidean":
        return np.sqrt(acc)
    if kind == "minkowski":
        return acc ** (1.0 / metric.p)
    return acc


def distance(metric: Metric, a, b) -> float:
    """Distance between two feature vectors of equal dimension."""
    a = as_feature_vector(a)
    b = as_feature_vector(b)
    if a.size != b.size:
        raise DimensionMismatchError(f"dimensions differ: {a.size} vs {b.size}")
    return float(_accumulate(metric, a[None, :], b[None, :])[0])


def distance_matrix(metric: Metric, queries: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Distances between every row of ``queries`` (Q, n) and of ``X`` (N, n).

    Returns an array of shape (Q, N). Entry ``[q, i]`` equals
    ``distance(metric, queries[q], X[i])`` exactly.
    """
    queries = np.asarray(queries, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if queries.ndim != 2 or X.ndim != 2 or queries.shape[1] != X.shape[1]:
        raise DimensionMismatchError(
            f"cannot compare queries of shape {queries.shape} with data of shape {X.shape}"
        )
    return _accumulate(metric, queries[:, None, :], X[None, :, :])


def pairwise_distances(metric: Metric, query, train: TrainingSet) -> np.ndarray:
    """Distances from ``query`` to every training sample, in training order."""
    q = as_feature_vector(query, train.dimension)
    return _accumulate(metric, q[None, :], train.X)
