"""Flexible KNN (fixed-radius neighbors with rejection) and the standard KNN.

Neighbor search is an exact linear scan. Neighbors are always ordered by
distance with ties broken by ascending training index, and every voting
scheme breaks winner ties by the smaller summed neighbor distance, then the
lower class id.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ClassificationOutcome,
    NeighborSet,
    RejectionReason,
    TrainingSet,
)
from .errors import (
    DimensionMismatchError,
    EmptyNeighborSetError,
    KExceedsNError,
    NonFiniteValueError,
)
from .metrics import EUCLIDEAN, Metric, distance_matrix, pairwise_distances


class Voting(str, enum.Enum):
    MAJORITY = "majority"
    WEIGHTED = "weighted"
    RATIO = "ratio"


@dataclass(frozen=True)
class FlexKnnConfig:
    d_max: float
    metric: Metric = EUCLIDEAN
    voting: Voting = Voting.MAJORITY
    min_k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "voting", Voting(self.voting))
        if not self.d_max > 0:
            raise ValueError(f"d_max must be positive, got {self.d_max}")
        if int(self.min_k) != self.min_k or self.min_k < 1:
            raise ValueError(f"min_k must be an integer >= 1, got {self.min_k}")


@dataclass(frozen=True)
class KnnConfig:
    k: int
    metric: Metric = EUCLIDEAN
    voting: Voting = Voting.MAJORITY

    def __post_init__(self):
        object.__setattr__(self, "voting", Voting(self.voting))
        if self.voting is Voting.RATIO:
            raise ValueError("class-ratio voting is only defined for the flexible classifier")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k}")


@dataclass(frozen=True)
class VoteTable:
    """Per-class tallies for one neighbor set.

    ``votes`` and ``distance_sums`` map class id to value and only contain
    classes that occur among the neighbors.
    """

    votes: dict
    distance_sums: dict
    winner: int
    weights: np.ndarray | None = field(default=None, repr=False)


def _sorted_neighbors(d: np.ndarray, candidates: np.ndarray) -> NeighborSet:
    # candidates are ascending indices, so a stable sort on distance keeps
    # ties in index order
    order = np.argsort(d[candidates], kind="stable")
    idx = candidates[order]
    return NeighborSet(idx, d[idx])


def neighbors_within(d: np.ndarray, d_max: float) -> NeighborSet:
    """Radius search over a precomputed distance row."""
    return _sorted_neighbors(d, np.flatnonzero(d <= d_max))


def nearest_from_distances(d: np.ndarray, k: int) -> NeighborSet:
    order = np.argsort(d, kind="stable")[:k]
    return NeighborSet(order, d[order])


def radius_neighbors(train: TrainingSet, query, metric: Metric, d_max: float) -> NeighborSet:
    """All training samples within ``d_max`` of ``query`` (boundary included)."""
    if not d_max > 0:
        raise ValueError(f"d_max must be positive, got {d_max}")
    return neighbors_within(pairwise_distances(metric, query, train), d_max)


def k_nearest_neighbors(train: TrainingSet, query, metric: Metric, k: int) -> NeighborSet:
    """The ``k`` closest training samples, ties broken by training index."""
    _check_k(k, train)
    return nearest_from_distances(pairwise_distances(metric, query, train), k)


def _check_k(k, train):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > len(train):
        raise KExceedsNError(f"k={k} exceeds the number of training samples N={len(train)}")


def _seq_total(values: np.ndarray) -> float:
    # left-to-right summation; must agree with the prefix sums used in sweeps
    return float(np.cumsum(values)[-1])


def pick_winner(class_ids, votes, distance_sums) -> int:
    """Highest vote; ties by smaller summed distance, then lower class id."""
    best = None
    for cid, v, s in zip(class_ids, votes, distance_sums):
        key = (-v, s, cid)
        if best is None or key < best:
            best = key
    return int(best[2])


def tally_votes(neighbors: NeighborSet, train: TrainingSet, voting=Voting.MAJORITY) -> VoteTable:
    """Count or weigh the neighbors' classes and pick the winner.

    Majority counts neighbors per class. Weighted gives neighbor k the weight
    ``(1/d_k) / sum_j (1/d_j)``; if some neighbors sit at distance zero they
    share the whole weight equally and the rest get nothing. Ratio divides
    the per-class count by that class's training-set size.
    """
    voting = Voting(voting)
    if neighbors.k == 0:
        raise EmptyNeighborSetError("cannot vote over an empty neighbor set")
    n_classes = train.n_classes
    cls = train.class_ids[neighbors.indices]
    dist = neighbors.distances
    counts = np.bincount(cls, minlength=n_classes + 1)
    dsums = np.bincount(cls, weights=dist, minlength=n_classes + 1)
    present = np.flatnonzero(counts)

    weights = None
    if voting is Voting.MAJORITY:
        values = counts.astype(np.float64)
        votes = {int(c): int(counts[c]) for c in present}
    elif voting is Voting.RATIO:
        values = np.zeros(n_classes + 1)
        values[present] = counts[present] / train.counts[present - 1]
        votes = {int(c): float(values[c]) for c in present}
    else:
        zero = dist == 0.0
        if zero.any():
            n_zero = int(np.count_nonzero(zero))
            weights = np.where(zero, 1.0 / n_zero, 0.0)
            values = np.bincount(cls[zero], minlength=n_classes + 1) / n_zero
        else:
            inv = 1.0 / dist
            total = _seq_total(inv)
            weights = inv / total
            values = np.bincount(cls, weights=inv, minlength=n_classes + 1) / total
        votes = {int(c): float(values[c]) for c in present}

    winner = pick_winner(present.tolist(), values[present].tolist(), dsums[present].tolist())
    return VoteTable(votes, {int(c): float(dsums[c]) for c in present}, winner, weights)


def _outcome_from_neighbors(train, neighbors, voting, min_k) -> ClassificationOutcome:
    k = neighbors.k
    if k < min_k:
        reason = (
            RejectionReason.NO_NEIGHBORS_WITHIN_RADIUS if k == 0 else RejectionReason.BELOW_MIN_K
        )
        votes = tally_votes(neighbors, train, voting).votes if k else {}
        return ClassificationOutcome(None, k, votes, reason)
    table = tally_votes(neighbors, train, voting)
    return ClassificationOutcome(train.label(table.winner), k, table.votes)


def classify_flexknn(train: TrainingSet, query, cfg: FlexKnnConfig) -> ClassificationOutcome:
    """Label ``query`` from the training samples within ``cfg.d_max``.

    Rejects when fewer than ``cfg.min_k`` samples are inside the radius.
    """
    nb = radius_neighbors(train, query, cfg.metric, cfg.d_max)
    return _outcome_from_neighbors(train, nb, cfg.voting, cfg.min_k)


def classify_knn(train: TrainingSet, query, cfg: KnnConfig) -> ClassificationOutcome:
    """Label ``query`` from its ``cfg.k`` nearest training samples. Never rejects."""
    nb = k_nearest_neighbors(train, query, cfg.metric, cfg.k)
    table = tally_votes(nb, train, cfg.voting)
    return ClassificationOutcome(train.label(table.winner), nb.k, table.votes)


def classify_from_distances(train: TrainingSet, d: np.ndarray, cfg) -> ClassificationOutcome:
    """Classify a query given its precomputed distance row to ``train``."""
    if isinstance(cfg, FlexKnnConfig):
        return _outcome_from_neighbors(train, neighbors_within(d, cfg.d_max), cfg.voting, cfg.min_k)
    _check_k(cfg.k, train)
    nb = nearest_from_distances(d, cfg.k)
    table = tally_votes(nb, train, cfg.voting)
    return ClassificationOutcome(train.label(table.winner), nb.k, table.votes)


def iter_distance_rows(train: TrainingSet, queries: np.ndarray, metric: Metric, chunk: int = 256):
    """Yield the distance row of every query, computing them in blocks."""
    for start in range(0, len(queries), chunk):
        block = distance_matrix(metric, queries[start : start + chunk], train.X)
        yield from block


def _check_queries(Q: np.ndarray, train: TrainingSet) -> None:
    if Q.ndim != 2 or Q.shape[1] != train.dimension:
        raise DimensionMismatchError(
            f"queries of shape {Q.shape} do not match training dimension {train.dimension}"
        )
    bad = ~np.isfinite(Q).all(axis=1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NonFiniteValueError(f"query {i} contains NaN or infinite values", index=i)


def classify_batch(train: TrainingSet, queries, cfg) -> list[ClassificationOutcome]:
    """Classify every row of ``queries`` independently."""
    Q = np.asarray(queries, dtype=np.float64)
    if Q.ndim == 1:
        Q = Q[None, :]
    _check_queries(Q, train)
    if isinstance(cfg, KnnConfig):
        _check_k(cfg.k, train)
    return [classify_from_distances(train, d, cfg) for d in iter_distance_rows(train, Q, cfg.metric)]
