"""Estimate the neighbor radius from the spread of each training class."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .core import TrainingSet
from .errors import NoEstimableClassError
from .metrics import EUCLIDEAN, Metric, distance_matrix


@dataclass(frozen=True)
class DmaxEstimate:
    """Per-class leave-one-out spreads and their aggregates.

    ``per_class`` maps class id to the mean, over the samples of that class,
    of each sample's average distance to the other samples of the class.
    Classes with fewer than two samples cannot be estimated and are listed
    in ``skipped_classes``.
    """

    per_class: dict
    aggregate_mean: float
    aggregate_median: float
    skipped_classes: tuple = ()

    def aggregate(self, how: str = "mean") -> float:
        if how == "mean":
            return self.aggregate_mean
        if how == "median":
            return self.aggregate_median
        raise ValueError(f"unknown aggregate {how!r}; expected 'mean' or 'median'")


def class_spread(X: np.ndarray, metric: Metric = EUCLIDEAN) -> float:
    """Mean leave-one-out distance within one class (needs at least 2 rows)."""
    n = X.shape[0]
    D = distance_matrix(metric, X, X)
    # correctly rounded sums keep the result independent of sample order;
    # the diagonal is an exact zero and does not change the sum
    per_sample = [math.fsum(row) / (n - 1) for row in D.tolist()]
    return math.fsum(per_sample) / n


def estimate_dmax(train: TrainingSet, metric: Metric = EUCLIDEAN) -> DmaxEstimate:
    per_class = {}
    skipped = []
    for c in train.classes:
        rows = train.X[train.class_ids == c.id]
        if rows.shape[0] < 2:
            skipped.append(c.id)
            continue
        per_class[c.id] = class_spread(rows, metric)
    if not per_class:
        raise NoEstimableClassError("every class has fewer than two training samples")
    values = list(per_class.values())
    return DmaxEstimate(
        per_class=per_class,
        aggregate_mean=math.fsum(values) / len(values),
        aggregate_median=float(statistics.median(values)),
        skipped_classes=tuple(skipped),
    )
