"""
Fixed-radius neighborhoods on three toy layouts
===============================================

K is an output here: the classifier counts whatever lies within d_max.
Standard KNN with a fixed K is printed alongside for contrast.
"""
from flexknn import EUCLIDEAN, FlexKnnConfig, KnnConfig, ScenarioSpec, classify_flexknn, classify_knn
from flexknn import generate_scenario, radius_neighbors

for name in ("fig1a", "fig1b", "fig1c"):
    sc = generate_scenario(ScenarioSpec(name, seed=0))
    query = sc.test[0].vector
    print(f"--- {name}: {len(sc.train)} training samples, query at {query}")

    for d_max in (1.0, 2.0, 3.0):
        out = classify_flexknn(sc.train, query, FlexKnnConfig(d_max))
        nb = radius_neighbors(sc.train, query, EUCLIDEAN, d_max)
        names = [sc.train.label_of(i).name for i in nb.indices]
        split = {n: names.count(n) for n in sorted(set(names))}
        verdict = out.label_name if not out.rejected else f"rejected ({out.rejection.value})"
        print(f"  d_max={d_max}: K={out.k_found:2d} {split}  -> {verdict}")

    # plain KNN always answers, even when the nearest sample is far away
    for k in (1, 3, 5):
        out = classify_knn(sc.train, query, KnnConfig(k))
        print(f"  knn k={k}: {out.label_name}")

    if sc.hidden:
        print(f"  the query really belongs to {sc.test[0].label}, which is absent from training")
