"""
Picking d_max from the training data, then scoring it
=====================================================

A simple starting point for d_max is the mean within-class spread.
We normalize on the training set only, estimate d_max and evaluate.
"""
import numpy as np

from flexknn import FlexKnnConfig, KnnConfig, LabeledSample, apply_normalization, clusters, estimate_dmax
from flexknn import evaluate, fit_normalization

rng = np.random.default_rng(3)
centers = rng.normal(size=(5, 14)) * 2.0
# features on wildly different scales, as raw sensor readings tend to be
scale = np.geomspace(0.01, 100, 14)
sc = clusters(centers, 1.0, 200, test_counts=100, seed=3)

raw_train = sc.train.map(lambda x: x * scale)
raw_test = [LabeledSample(tuple(np.asarray(s.vector) * scale), s.label) for s in sc.test]

params = fit_normalization(raw_train)
train = apply_normalization(params, raw_train)
test = apply_normalization(params, raw_test)

est = estimate_dmax(train)
print("per-class spread:", {train.label(c).name: round(v, 3) for c, v in est.per_class.items()})
print(f"mean {est.aggregate_mean:.3f}  median {est.aggregate_median:.3f}")

for d_max in (0.5 * est.aggregate_mean, est.aggregate_mean, 1.5 * est.aggregate_mean):
    r = evaluate(train, test, FlexKnnConfig(d_max))
    print(
        f"d_max={d_max:.2f}  labeled={r.labeled_accuracy_all:.3f} "
        f"rejected={r.rejection_rate:.3f} composite={r.composite_accuracy:.3f} mean K={r.mean_k:.1f}"
    )

r = evaluate(train, test, KnnConfig(3))
print(f"knn k=3        labeled={r.labeled_accuracy_all:.3f}")

# confusion matrix at the estimated radius, rows are true classes
conf = evaluate(train, test, FlexKnnConfig(est.aggregate_mean)).confusion
print(" " * 8 + " ".join(f"{c:>8}" for c in conf.columns))
for name, row in zip(conf.rows, conf.matrix):
    print(f"{name:>8}" + " ".join(f"{v:8d}" for v in row))
