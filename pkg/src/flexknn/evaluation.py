"""Evaluation protocols: single runs, radius sweeps and held-out classes.

A rejected test sample counts toward ``composite_accuracy`` whatever its
true class, so ``composite_accuracy == labeled_accuracy_all + rejection_rate``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .classifiers import (
    FlexKnnConfig,
    KnnConfig,
    Voting,
    classify_batch,
    iter_distance_rows,
)
from .core import TrainingSet
from .dataio import as_arrays, format_float
from .errors import (
    AllClassesHeldOutError,
    DimensionMismatchError,
    EmptyGridError,
    EmptyTestSetError,
    UnknownHeldOutClassError,
)
from .metrics import EUCLIDEAN, Metric

REJECTED = "rejected"

SWEEP_COLUMNS = (
    "dmax",
    "labeled_accuracy_all",
    "labeled_accuracy_conditional",
    "composite_accuracy",
    "rejection_rate",
    "mean_k",
)


@dataclass(frozen=True)
class Confusion:
    """Counts of (true class, predicted class or ``rejected``)."""

    rows: tuple
    columns: tuple
    matrix: tuple

    def to_dict(self) -> dict:
        return {"rows": list(self.rows), "columns": list(self.columns), "matrix": [list(r) for r in self.matrix]}

    def row_sums(self) -> dict:
        return {name: sum(r) for name, r in zip(self.rows, self.matrix)}


@dataclass(frozen=True)
class EvaluationReport:
    total: int
    labeled: int
    correct: int
    rejected: int
    labeled_accuracy_all: float
    labeled_accuracy_conditional: float | None
    composite_accuracy: float
    rejection_rate: float
    mean_k: float
    confusion: Confusion

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "confusion"}
        d["confusion"] = self.confusion.to_dict()
        return d


def _report(total, correct, rejected, k_sum, confusion) -> EvaluationReport:
    labeled = total - rejected
    return EvaluationReport(
        total=total,
        labeled=labeled,
        correct=correct,
        rejected=rejected,
        labeled_accuracy_all=correct / total,
        labeled_accuracy_conditional=correct / labeled if labeled else None,
        composite_accuracy=(correct + rejected) / total,
        rejection_rate=rejected / total,
        mean_k=k_sum / total,
        confusion=confusion,
    )


def _confusion_axes(train: TrainingSet, true_names):
    names = list(train.class_names)
    extra = sorted(set(true_names) - set(names))
    return tuple(names + extra), tuple(names + [REJECTED])


def summarize(train: TrainingSet, outcomes, true_names) -> EvaluationReport:
    """Aggregate per-sample outcomes into a report."""
    outcomes = list(outcomes)
    true_names = list(true_names)
    if not outcomes:
        raise EmptyTestSetError("no test samples")
    rows, cols = _confusion_axes(train, true_names)
    row_of = {n: i for i, n in enumerate(rows)}
    col_of = {n: i for i, n in enumerate(cols)}
    matrix = np.zeros((len(rows), len(cols)), dtype=np.int64)
    correct = rejected = k_sum = 0
    for out, truth in zip(outcomes, true_names):
        k_sum += out.k_found
        if out.rejected:
            rejected += 1
            matrix[row_of[truth], col_of[REJECTED]] += 1
        else:
            correct += out.label.name == truth
            matrix[row_of[truth], col_of[out.label.name]] += 1
    confusion = Confusion(rows, cols, tuple(tuple(r) for r in matrix.tolist()))
    return _report(len(outcomes), int(correct), rejected, k_sum, confusion)


def _test_arrays(train, test):
    test = list(test)
    if not test:
        raise EmptyTestSetError("test set is empty")
    for i, s in enumerate(test):
        if s.dimension != train.dimension:
            raise DimensionMismatchError(
                f"test sample {i} has dimension {s.dimension}, training data has {train.dimension}",
                index=i,
            )
    return as_arrays(test)


def evaluate(train: TrainingSet, test, cfg) -> EvaluationReport:
    """Classify every test sample independently and score the results.

    ``cfg`` is a ``FlexKnnConfig`` or a ``KnnConfig``.
    """
    X, names = _test_arrays(train, test)
    return summarize(train, classify_batch(train, X, cfg), names)


@dataclass(frozen=True)
class SweepReport:
    grid: tuple
    reports: tuple

    @property
    def rows(self):
        return list(zip(self.grid, self.reports))

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.reports]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(SWEEP_COLUMNS) + "\n")
        for d, r in self.rows:
            cond = "" if r.labeled_accuracy_conditional is None else format_float(r.labeled_accuracy_conditional)
            vals = [
                repr(float(d)),
                format_float(r.labeled_accuracy_all),
                cond,
                format_float(r.composite_accuracy),
                format_float(r.rejection_rate),
                format_float(r.mean_k),
            ]
            buf.write(",".join(vals) + "\n")
        return buf.getvalue()


def _check_grid(grid):
    grid = [float(g) for g in grid]
    if not grid:
        raise EmptyGridError("d_max grid is empty")
    if any(not g > 0 for g in grid):
        raise ValueError("d_max grid values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("d_max grid must be strictly increasing")
    return grid


def _prefix_winners(cnt, dsum, values):
    present = cnt > 0
    v = np.where(present, values, -np.inf)
    cand = present & (v == v.max(axis=1, keepdims=True))
    s = np.where(cand, dsum, np.inf)
    cand &= s == s.min(axis=1, keepdims=True)
    return np.argmax(cand, axis=1)


def sweep_dmax(
    train: TrainingSet,
    test,
    grid,
    metric: Metric = EUCLIDEAN,
    voting=Voting.MAJORITY,
    min_k: int = 1,
) -> SweepReport:
    """Evaluate the flexible classifier at every radius in ``grid``.

    Each test sample's distances are sorted once; per-class counts and
    distance sums along that order then give the vote at every radius.
    Every row is identical to a separate :func:`evaluate` call.
    """
    grid = _check_grid(grid)
    FlexKnnConfig(grid[0], metric, voting, min_k)  # validates the shared settings
    voting = Voting(voting)
    X, names = _test_arrays(train, test)

    rows, cols = _confusion_axes(train, names)
    row_of = {n: i for i, n in enumerate(rows)}
    col_rejected = len(cols) - 1
    n_train_classes = train.n_classes
    true_ids = np.array([train.class_by_name(n).id if n in train else 0 for n in names])
    g = np.array(grid)
    G = len(grid)
    ar = np.arange(G)

    correct = np.zeros(G, dtype=np.int64)
    rejected = np.zeros(G, dtype=np.int64)
    k_sum = np.zeros(G, dtype=np.int64)
    confusion = np.zeros((G, len(rows), len(cols)), dtype=np.int64)
    class_sizes = np.concatenate([[1], train.counts]).astype(np.float64)

    for t, d in enumerate(iter_distance_rows(train, X, metric)):
        order = np.argsort(d, kind="stable")
        ds = d[order]
        Ks = np.searchsorted(ds, g, side="right")
        k_sum += Ks
        cls_col = np.full(G, col_rejected)
        ok = Ks >= min_k
        kmax = int(Ks[-1])
        if ok.any():
            P = ds[:kmax]
            C = train.class_ids[order[:kmax]]
            idx = np.arange(kmax)
            cnt = np.zeros((kmax, n_train_classes + 1))
            cnt[idx, C] = 1.0
            cnt = np.cumsum(cnt, axis=0)
            dsum = np.zeros((kmax, n_train_classes + 1))
            dsum[idx, C] = P
            dsum = np.cumsum(dsum, axis=0)

            K = Ks[ok]
            r = K - 1
            if voting is Voting.MAJORITY:
                values = cnt[r]
            elif voting is Voting.RATIO:
                values = cnt[r] / class_sizes
            else:
                n_zero = int(np.count_nonzero(P == 0.0))
                if n_zero:
                    z = np.minimum(K, n_zero)
                    values = cnt[z - 1] / z[:, None]
                else:
                    inv = 1.0 / P
                    icum = np.zeros((kmax, n_train_classes + 1))
                    icum[idx, C] = inv
                    icum = np.cumsum(icum, axis=0)
                    total = np.cumsum(inv)
                    values = icum[r] / total[r][:, None]
            win = _prefix_winners(cnt[r], dsum[r], values)
            cls_col[ok] = win - 1
            correct[ok] += win == true_ids[t]
        rejected += ~ok
        confusion[ar, row_of[names[t]], cls_col] += 1

    total = len(names)
    reports = tuple(
        _report(
            total,
            int(correct[i]),
            int(rejected[i]),
            int(k_sum[i]),
            Confusion(rows, cols, tuple(tuple(r) for r in confusion[i].tolist())),
        )
        for i in range(G)
    )
    return SweepReport(tuple(grid), reports)


def parse_grid(text: str) -> list[float]:
    """Expand ``start:step:end`` into an inclusive grid.

    The end point is included when it lies on the grid within 1e-9. Values
    are computed as ``start + i * step`` in decimal so that e.g. ``0.3``
    comes out as the double nearest to 0.3.
    """
    from decimal import Decimal, InvalidOperation

    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:step:end, got {text!r}")
    try:
        start, step, end = (Decimal(p.strip()) for p in parts)
    except InvalidOperation:
        raise ValueError(f"grid must look like start:step:end, got {text!r}") from None
    if step <= 0:
        raise ValueError("grid step must be positive")
    if start <= 0:
        raise ValueError("grid start must be positive")
    if end < start:
        raise ValueError("grid end must not be below its start")
    n = int((end - start) / step + Decimal("1e-9")) + 1
    return [float(start + i * step) for i in range(n)]


DEFAULT_GRID = "0.1:0.1:8.0"


@dataclass(frozen=True)
class HoldoutReport:
    """Results with some classes removed from the training data.

    ``held_out`` scores only test samples of the removed classes (None if
    there are none); for those a rejection is the right answer and any label
    is an error. ``kept`` scores the remaining test samples.
    """

    held_out_classes: tuple
    overall: EvaluationReport
    held_out: EvaluationReport | None
    kept: EvaluationReport | None

    def to_dict(self) -> dict:
        return {
            "held_out_classes": list(self.held_out_classes),
            "overall": self.overall.to_dict(),
            "held_out": None if self.held_out is None else self.held_out.to_dict(),
            "kept": None if self.kept is None else self.kept.to_dict(),
        }


def missing_class_experiment(train: TrainingSet, test, held_out, cfg) -> HoldoutReport:
    """Train without the ``held_out`` classes and evaluate on the full test set."""
    held = list(dict.fromkeys(held_out))
    if not held:
        raise ValueError("at least one class must be held out")
    unknown = [h for h in held if h not in train]
    if unknown:
        raise UnknownHeldOutClassError(f"not a training class: {', '.join(unknown)}")
    if len(held) == train.n_classes:
        raise AllClassesHeldOutError("holding out every class leaves no training data")
    reduced = train.without_classes(held)
    X, names = _test_arrays(reduced, test)
    outcomes = classify_batch(reduced, X, cfg)
    overall = summarize(reduced, outcomes, names)
    held_set = set(held)
    in_held = [n in held_set for n in names]

    def part(flag):
        sel = [(o, n) for o, n, h in zip(outcomes, names, in_held) if h == flag]
        if not sel:
            return None
        return summarize(reduced, [o for o, _ in sel], [n for _, n in sel])

    return HoldoutReport(tuple(held), overall, part(True), part(False))
