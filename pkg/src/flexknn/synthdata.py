"""Deterministic synthetic data sets.

``fig1a``, ``fig1b`` and ``fig1c`` are small two-dimensional layouts with
one test point and prescribed neighbor counts around it; ``clusters`` draws
isotropic Gaussian point clouds. Randomness comes from SplitMix64, a
64-bit counter-based mixing function that is simple to reproduce exactly in
any language, so fixtures are bit-identical across platforms given a seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import LabeledSample, TrainingSet, build_training_set
from .errors import InvalidSpecError
from .metrics import EUCLIDEAN, pairwise_distances

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

SCENARIOS = ("fig1a", "fig1b", "fig1c", "clusters")

# minimum distance of any generated point from a radius that its counts are
# stated for
BOUNDARY_MARGIN = 1e-6


class SplitMix64:
    """SplitMix64 generator (Steele, Lea and Flood 2014).

    Output ``i`` (0-based) is ``mix(seed + (i + 1) * 0x9E3779B97F4A7C15)``
    modulo 2**64, so blocks of outputs can be computed with vectorized
    unsigned arithmetic.
    """

    def __init__(self, seed: int = 0):
        self.state = int(seed) & _MASK

    def next_u64(self, size: int) -> np.ndarray:
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + size * _GOLDEN) & _MASK
        return z

    def random(self, size: int) -> np.ndarray:
        """Uniform doubles in [0, 1) from the top 53 bits."""
        return (self.next_u64(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, low: float, high: float, size: int) -> np.ndarray:
        return low + (high - low) * self.random(size)

    def normal(self, size: int) -> np.ndarray:
        """Standard normal variates by the Box-Muller transform."""
        m = (size + 1) // 2
        u = self.random(2 * m)
        u1 = 1.0 - u[0::2]  # in (0, 1]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        t = 2.0 * math.pi * u2
        return np.concatenate([r * np.cos(t), r * np.sin(t)])[:size] if size else np.empty(0)


@dataclass(frozen=True)
class ScenarioSpec:
    """What to generate.

    For ``clusters`` every per-class sequence must have one entry per class;
    ``spreads`` and ``counts`` may also be scalars shared by all classes.
    ``test_counts`` defaults to zero test samples per class.
    """

    scenario: str
    seed: int = 0
    centers: Sequence[Sequence[float]] | None = None
    spreads: Sequence[float] | float | None = None
    counts: Sequence[int] | int | None = None
    test_counts: Sequence[int] | int | None = None
    names: Sequence[str] | None = None


class Scenario(NamedTuple):
    train: TrainingSet
    test: list
    hidden: list


FIG1_CENTER = (4.0, 4.0)


def _ring(rng, n, r_lo, r_hi, a_lo=0.0, a_hi=2 * math.pi, center=FIG1_CENTER):
    r = rng.uniform(r_lo, r_hi, n)
    a = rng.uniform(a_lo, a_hi, n)
    return np.column_stack([center[0] + r * np.cos(a), center[1] + r * np.sin(a)])


def _samples(points, label):
    return [LabeledSample(tuple(p), label) for p in np.asarray(points).tolist()]


def _fig1a(rng):
    pi = math.pi
    pts = [
        (_ring(rng, 5, 0.15, 0.9), "class1"),
        (_ring(rng, 15, 1.2, 2.5, -pi / 3, pi / 3), "class1"),
        (_ring(rng, 20, 1.6, 3.5, 2 * pi / 3, 4 * pi / 3), "class2"),
    ]
    return pts, [], "class1"


def _fig1b(rng):
    pi = math.pi
    pts = [
        (_ring(rng, 10, 0.1, 0.6), "class2"),
        (_ring(rng, 2, 0.75, 0.95), "class1"),
        (_ring(rng, 10, 1.1, 2.5, -pi / 3, pi / 3), "class2"),
        (_ring(rng, 18, 1.3, 3.0, 2 * pi / 3, 4 * pi / 3), "class1"),
    ]
    return pts, [], "class2"


def _fig1c(rng):
    pi = math.pi
    pts = [
        (_ring(rng, 1, 1.2, 1.8, pi / 4, 3 * pi / 4), "class1"),
        (_ring(rng, 1, 2.2, 2.8, pi / 2, pi), "class1"),
        (_ring(rng, 18, 3.3, 5.0, pi / 2, pi), "class1"),
        (_ring(rng, 2, 2.2, 2.8, -pi / 2, 0.0), "class2"),
        (_ring(rng, 18, 3.3, 5.0, -pi / 2, 0.0), "class2"),
    ]
    # the unknown class: 11 of its 20 samples lie inside the unit circle
    hidden = [
        (_ring(rng, 11, 0.05, 0.9), "class3"),
        (_ring(rng, 9, 1.1, 1.6, pi, 3 * pi / 2), "class3"),
    ]
    return pts, hidden, "class3"


# expected (radius -> {class: count}) for each toy layout
_FIG1_COUNTS = {
    "fig1a": {1.0: {"class1": 5}},
    "fig1b": {1.0: {"class1": 2, "class2": 10}},
    "fig1c": {1.0: {}, 2.0: {"class1": 1}, 3.0: {"class1": 2, "class2": 2}},
}


def _check_fig1(name, train, query):
    d = pairwise_distances(EUCLIDEAN, query, train)
    names = train.class_names
    for radius, expected in _FIG1_COUNTS[name].items():
        if np.any(np.abs(d - radius) <= BOUNDARY_MARGIN):
            raise AssertionError(f"{name}: a training point lies on the radius-{radius} boundary")
        found = {}
        for cid in train.class_ids[d <= radius].tolist():
            found[names[cid - 1]] = found.get(names[cid - 1], 0) + 1
        if found != expected:
            raise AssertionError(f"{name}: expected {expected} within {radius}, found {found}")


def _toy_layout(name, seed):
    rng = SplitMix64(seed)
    groups, hidden_groups, test_label = {"fig1a": _fig1a, "fig1b": _fig1b, "fig1c": _fig1c}[name](rng)
    # class1 first so that class ids match class names
    train_samples = sorted(
        (s for pts, lab in groups for s in _samples(pts, lab)), key=lambda s: s.label
    )
    train = build_training_set(train_samples)
    test = [LabeledSample(FIG1_CENTER, test_label)]
    hidden = [s for pts, lab in hidden_groups for s in _samples(pts, lab)]
    _check_fig1(name, train, FIG1_CENTER)
    return Scenario(train, test, hidden)


def _per_class(value, m, what, cast):
    if value is None:
        raise InvalidSpecError(f"clusters scenario needs {what}")
    if np.isscalar(value):
        return [cast(value)] * m
    value = [cast(v) for v in value]
    if len(value) != m:
        raise InvalidSpecError(f"{what} has {len(value)} entries for {m} classes")
    return value


def _clusters(spec: ScenarioSpec) -> Scenario:
    if spec.centers is None or len(spec.centers) == 0:
        raise InvalidSpecError("clusters scenario needs at least one center")
    centers = [np.asarray(c, dtype=np.float64) for c in spec.centers]
    n = centers[0].size
    if n < 1 or any(c.ndim != 1 or c.size != n for c in centers):
        raise InvalidSpecError("all centers must be non-empty vectors of the same dimension")
    if not all(np.all(np.isfinite(c)) for c in centers):
        raise InvalidSpecError("centers must be finite")
    m = len(centers)
    spreads = _per_class(spec.spreads, m, "spreads", float)
    counts = _per_class(spec.counts, m, "counts", int)
    test_counts = _per_class(0 if spec.test_counts is None else spec.test_counts, m, "test_counts", int)
    names = list(spec.names) if spec.names is not None else [f"class{i + 1}" for i in range(m)]
    if len(names) != m or len(set(names)) != m:
        raise InvalidSpecError("names must be unique, one per class")
    if any(not (s >= 0 and math.isfinite(s)) for s in spreads):
        raise InvalidSpecError("spreads must be finite and non-negative")
    if any(c < 1 for c in counts) or any(c < 0 for c in test_counts):
        raise InvalidSpecError("counts must be >= 1 and test counts >= 0")

    rng = SplitMix64(spec.seed)
    train, test = [], []
    for center, spread, count, tcount, name in zip(centers, spreads, counts, test_counts, names):
        pts = center + spread * rng.normal((count + tcount) * n).reshape(count + tcount, n)
        train += _samples(pts[:count], name)
        test += _samples(pts[count:], name)
    return Scenario(build_training_set(train), test, [])


def generate_scenario(spec: ScenarioSpec) -> Scenario:
    """Build the training set, test samples and hidden samples of ``spec``.

    Hidden samples (only ``fig1c`` has any) belong to a class that is absent
    from the training set.
    """
    if spec.scenario not in SCENARIOS:
        raise InvalidSpecError(f"unknown scenario {spec.scenario!r}; expected one of {SCENARIOS}")
    if spec.scenario == "clusters":
        return _clusters(spec)
    return _toy_layout(spec.scenario, spec.seed)


def clusters(centers, spreads, counts, test_counts=None, seed=0, names=None) -> Scenario:
    return generate_scenario(
        ScenarioSpec("clusters", seed, centers, spreads, counts, test_counts, names)
    )
