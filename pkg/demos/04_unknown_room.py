"""
A room the model has never seen
===============================

Drop one class from training and look at what happens to its test samples.
KNN has to pick one of the known classes. FlexKNN can say "none of these".
"""
from flexknn import FlexKnnConfig, KnnConfig, clusters, missing_class_experiment

sc = clusters(
    [[0, 0, 0, 0], [2.5, 0, 0, 0], [15, 15, 0, 0]],
    0.6,
    150,
    test_counts=60,
    seed=42,
    names=["room1", "room2", "room3"],
)

for cfg in (FlexKnnConfig(1.5), KnnConfig(3)):
    rep = missing_class_experiment(sc.train, sc.test, ["room3"], cfg)
    h = rep.held_out
    print(type(cfg).__name__)
    print(f"  held-out room3: labeled {h.labeled}, rejected {h.rejected}, composite {h.composite_accuracy:.2f}")
    print(f"  known rooms:    labeled accuracy {rep.kept.labeled_accuracy_all:.3f}")
    print(f"  overall:        composite {rep.overall.composite_accuracy:.3f}")
