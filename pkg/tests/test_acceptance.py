"""Acceptance criteria.

Each test is one criterion; the terminal summary prints a PASS/FAIL line per
criterion (see conftest.py). Tolerances and time limits are fixed here.
"""
import time

import numpy as np
import pytest

from flexknn import (
    EUCLIDEAN,
    FlexKnnConfig,
    KnnConfig,
    LabeledSample,
    Voting,
    apply_normalization,
    classify_flexknn,
    classify_knn,
    clusters,
    distance,
    estimate_dmax,
    evaluate,
    fit_normalization,
    k_nearest_neighbors,
    missing_class_experiment,
    pairwise_distances,
    parse_grid,
    radius_neighbors,
    sweep_dmax,
)
from flexknn.core import training_set_from_arrays
from flexknn.metrics import distance_matrix

from conftest import ALL_METRICS, random_instance
from oracles import dmax_double_loop


def _elapsed(start):
    return time.perf_counter() - start


def _check_report(r):
    assert abs(r.composite_accuracy - (r.labeled_accuracy_all + r.rejection_rate)) <= 1e-12
    assert r.composite_accuracy >= r.labeled_accuracy_all
    assert r.labeled + r.rejected == r.total


@pytest.mark.criterion(1, "toy layouts fig1a/b/c: (class1,K=5), (class2,K=12), rejected K=0; fig1c K=1 at 2, K=4 (2/2) at 3")
def test_ac01_toy_layouts(fig1):
    start = time.perf_counter()
    a, b, c = fig1["fig1a"], fig1["fig1b"], fig1["fig1c"]
    cfg = FlexKnnConfig(1.0)
    out = classify_flexknn(a.train, a.test[0].vector, cfg)
    assert (out.label_name, out.k_found) == ("class1", 5)
    out = classify_flexknn(b.train, b.test[0].vector, cfg)
    assert (out.label_name, out.k_found) == ("class2", 12)
    out = classify_flexknn(c.train, c.test[0].vector, cfg)
    assert out.rejected and out.k_found == 0
    q = c.test[0].vector
    assert radius_neighbors(c.train, q, EUCLIDEAN, 2.0).k == 1
    nb = radius_neighbors(c.train, q, EUCLIDEAN, 3.0)
    names = [c.train.label_of(i).name for i in nb.indices]
    assert nb.k == 4 and names.count("class1") == 2 and names.count("class2") == 2
    assert _elapsed(start) < 1.0


@pytest.mark.criterion(2, "radius/k-nearest search equal naive scan/sort oracles on 200 instances, all metrics")
def test_ac02_oracle_equivalence():
    start = time.perf_counter()
    checked = 0
    for seed in range(200):
        ts, q = random_instance(seed, max_n_train=500, max_dim=16, grid=3 if seed % 3 == 0 else None)
        metric = ALL_METRICS[seed % len(ALL_METRICS)]
        oracle_d = [distance(metric, q, row) for row in ts.X]
        ranked = sorted((d, i) for i, d in enumerate(oracle_d))
        for d_max in sorted({ranked[len(ranked) // 4][0], ranked[-1][0], 0.5, 2.0}):
            if d_max <= 0:
                continue
            nb = radius_neighbors(ts, q, metric, d_max)
            expected = [(d, i) for d, i in ranked if d <= d_max]
            assert nb.indices.tolist() == [i for _, i in expected]
            assert nb.distances.tolist() == [d for d, _ in expected]
        for k in sorted({1, max(1, len(ts) // 2), len(ts)}):
            nb = k_nearest_neighbors(ts, q, metric, k)
            assert nb.indices.tolist() == [i for _, i in ranked[:k]]
            assert nb.distances.tolist() == [d for d, _ in ranked[:k]]
        checked += 1
    assert checked == 200
    assert _elapsed(start) < 10.0


@pytest.mark.criterion(3, "monotonicity: neighbor sets nested, K, rejection rate and mean K monotone over 10-point grids")
def test_ac03_monotonicity():
    start = time.perf_counter()
    for seed in range(100):
        ts, q = random_instance(1000 + seed, max_n_train=300, max_dim=8, grid=2 if seed % 4 == 0 else None)
        metric = ALL_METRICS[seed % len(ALL_METRICS)]
        d = pairwise_distances(metric, q, ts)
        top = float(d.max()) * 1.1 + 1e-3
        grid = np.linspace(top / 10, top, 10).tolist()
        previous = set()
        prev_k = 0
        for d_max in grid:
            nb = radius_neighbors(ts, q, metric, d_max)
            current = set(nb.indices.tolist())
            assert previous <= current
            assert nb.k >= prev_k
            previous, prev_k = current, nb.k

        rng = np.random.default_rng(seed)
        Q = ts.X[rng.integers(0, len(ts), size=8)] + rng.normal(size=(8, ts.dimension))
        test = [LabeledSample(tuple(x), ts.class_names[i % ts.n_classes]) for i, x in enumerate(Q)]
        sweep = sweep_dmax(ts, test, grid, metric=metric, min_k=1 + seed % 3)
        rej = sweep.column("rejection_rate")
        mk = sweep.column("mean_k")
        assert all(b <= a for a, b in zip(rej, rej[1:]))
        assert all(b >= a for a, b in zip(mk, mk[1:]))
    assert _elapsed(start) < 10.0


@pytest.mark.criterion(4, "degeneracy: radius covering the training set gives the KNN(k=N) winner on 100 instances")
def test_ac04_degeneracy():
    for seed in range(100):
        ts, q = random_instance(2000 + seed, max_n_train=200, max_dim=6, grid=2 if seed % 2 else None)
        d = pairwise_distances(EUCLIDEAN, q, ts)
        diameter = float(distance_matrix(EUCLIDEAN, ts.X, ts.X).max())
        d_max = max(diameter, float(d.max())) + 1e-9
        flex = classify_flexknn(ts, q, FlexKnnConfig(d_max))
        knn = classify_knn(ts, q, KnnConfig(len(ts)))
        assert flex.k_found == len(ts)
        assert flex.label == knn.label


@pytest.mark.criterion(5, "consistency: FlexKNN majority label equals KNN with k=K on 100 cases")
def test_ac05_consistency():
    cases = 0
    seed = 3000
    while cases < 100:
        ts, q = random_instance(seed, max_n_train=200, max_dim=6, grid=2 if seed % 2 else None)
        seed += 1
        d = pairwise_distances(EUCLIDEAN, q, ts)
        d_max = float(np.quantile(d, 0.3))
        if d_max <= 0:
            continue
        flex = classify_flexknn(ts, q, FlexKnnConfig(d_max))
        if flex.k_found < 1:
            continue
        knn = classify_knn(ts, q, KnnConfig(flex.k_found))
        assert flex.label == knn.label
        cases += 1


@pytest.mark.criterion(6, "report algebra: composite = labeled_all + rejection (1e-12), composite >= labeled_all, counts add up")
def test_ac06_report_algebra():
    runs = 0
    for seed in range(12):
        rng = np.random.default_rng(seed)
        M = int(rng.integers(2, 5))
        sc = clusters(rng.normal(size=(M, 4)) * 2, rng.uniform(0.3, 1.5), 50, test_counts=20, seed=seed)
        expected_rows = {}
        for s in sc.test:
            expected_rows[s.label] = expected_rows.get(s.label, 0) + 1
        reports = []
        for cfg in (
            FlexKnnConfig(0.4),
            FlexKnnConfig(1.2, voting=Voting.WEIGHTED, min_k=2),
            FlexKnnConfig(2.0, voting=Voting.RATIO),
            KnnConfig(3),
            KnnConfig(7, voting=Voting.WEIGHTED),
        ):
            reports.append(evaluate(sc.train, sc.test, cfg))
        reports += list(sweep_dmax(sc.train, sc.test, parse_grid("0.2:0.2:4")).reports)
        held = missing_class_experiment(sc.train, sc.test, [sc.train.class_names[-1]], FlexKnnConfig(1.0))
        for r in reports + [held.overall, held.held_out, held.kept]:
            _check_report(r)
            runs += 1
        for r in reports:
            assert r.confusion.row_sums() == expected_rows
    assert runs > 300


@pytest.mark.criterion(7, "held-out distant class: FlexKNN rejects 100%, KNN mislabels 100%")
def test_ac07_missing_class():
    start = time.perf_counter()
    sc = clusters(
        [[0, 0, 0, 0], [2.5, 0, 0, 0], [15, 15, 0, 0]],
        [0.6, 0.6, 0.6],
        [150, 150, 150],
        test_counts=[60, 60, 60],
        seed=42,
        names=["room1", "room2", "room3"],
    )
    d_max = 1.5
    kept = sc.train.without_classes(["room3"])
    held_test = np.array([s.vector for s in sc.test if s.label == "room3"])
    assert distance_matrix(EUCLIDEAN, held_test, kept.X).min() > d_max

    flex = missing_class_experiment(sc.train, sc.test, ["room3"], FlexKnnConfig(d_max))
    assert flex.held_out.total == 60
    assert flex.held_out.rejection_rate == 1.0
    assert flex.held_out.composite_accuracy == 1.0

    knn = missing_class_experiment(sc.train, sc.test, ["room3"], KnnConfig(3))
    assert knn.held_out.labeled == 60
    assert knn.held_out.correct == 0
    assert knn.held_out.labeled_accuracy_all == 0.0
    assert _elapsed(start) < 5.0


@pytest.mark.criterion(8, "calibration: brute-force oracle on 50 instances, analytic cases, scale covariance 1e-12")
def test_ac08_calibration():
    one = training_set_from_arrays([[1.0, 1.0], [1.0, 5.0]], ["a", "a"])
    est = estimate_dmax(one)
    assert est.per_class == {1: 4.0} and est.aggregate_mean == 4.0
    two = training_set_from_arrays([[0.0], [2.0], [10.0], [16.0]], ["a", "a", "b", "b"])
    est = estimate_dmax(two)
    assert list(est.per_class.values()) == [2.0, 6.0]
    assert est.aggregate_mean == 4.0 and est.aggregate_median == 4.0

    for seed in range(50):
        rng = np.random.default_rng(4000 + seed)
        M = int(rng.integers(1, 6))
        X, labels = [], []
        for c in range(M):
            n_l = int(rng.integers(2, 31))
            X += (rng.normal(size=(n_l, 5)) * rng.uniform(0.1, 4) + rng.normal(size=5) * 3).tolist()
            labels += [f"k{c}"] * n_l
        ts = training_set_from_arrays(X, labels)
        est = estimate_dmax(ts)
        got = {ts.label(cid).name: v for cid, v in est.per_class.items()}
        assert got == dmax_double_loop(X, labels, EUCLIDEAN)
        for c in (0.5, 7.0):
            scaled = estimate_dmax(training_set_from_arrays(np.asarray(X) * c, labels))
            for cid, v in est.per_class.items():
                assert abs(scaled.per_class[cid] - c * v) <= 1e-12 * c * v
            assert abs(scaled.aggregate_mean - c * est.aggregate_mean) <= 1e-12 * c * est.aggregate_mean
            assert abs(scaled.aggregate_median - c * est.aggregate_median) <= 1e-12 * c * est.aggregate_median


@pytest.mark.criterion(9, "normalization: |mean| < 1e-9, |std - 1| < 1e-9, zero-std dimensions map to 0")
def test_ac09_normalization():
    for seed in range(20):
        rng = np.random.default_rng(5000 + seed)
        X = rng.normal(size=(200, 14)) * rng.uniform(1e-3, 1e3, size=14) + rng.normal(size=14) * 1e3
        const = rng.integers(0, 14)
        X[:, const] = rng.normal() * 100
        ts = training_set_from_arrays(X, ["r"] * 200)
        params = fit_normalization(ts)
        assert params.std[const] == 0.0
        Z = apply_normalization(params, ts).X
        live = [j for j in range(14) if j != const]
        assert np.all(np.abs(Z.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(Z[:, live].std(axis=0) - 1.0) < 1e-9)
        assert np.all(Z[:, const] == 0.0)


@pytest.mark.criterion(10, "sweep shape: labeled accuracy peaks inside the grid and ends lower")
def test_ac10_sweep_shape():
    start = time.perf_counter()
    sc = clusters(
        [[0, 0, 0], [3, 0, 0], [1.5, 8, 0]],
        [0.8, 0.8, 0.5],
        [300, 300, 20],
        test_counts=[100, 100, 40],
        seed=7,
        names=["big1", "big2", "small"],
    )
    sweep = sweep_dmax(sc.train, sc.test, parse_grid("0.1:0.1:12.0"))
    acc = sweep.column("labeled_accuracy_all")
    best = int(np.argmax(acc))
    assert 0 < best < len(acc) - 1
    assert max(acc) > acc[-1]
    # the small class is the one that gets swamped at large radii
    last = sweep.reports[-1].confusion
    small_row = last.matrix[last.rows.index("small")]
    assert small_row[last.columns.index("small")] == 0
    assert _elapsed(start) < 30.0


@pytest.mark.criterion(11, "80-point sweep, 4,000 train / 4,000 test, n=14, under 60 s")
def test_ac11_scale():
    rng = np.random.default_rng(11)
    centers = rng.normal(size=(7, 14)) * 1.5
    counts = [572] * 6 + [568]
    sc = clusters(centers, 1.0, counts, test_counts=counts, seed=11)
    assert len(sc.train) == 4000 and len(sc.test) == 4000 and sc.train.dimension == 14
    grid = parse_grid("0.1:0.1:8.0")
    assert len(grid) == 80
    start = time.perf_counter()
    sweep = sweep_dmax(sc.train, sc.test, grid)
    elapsed = _elapsed(start)
    assert len(sweep.reports) == 80
    print(f"80-point sweep took {elapsed:.1f} s")
    assert elapsed < 60.0
