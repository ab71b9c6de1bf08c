"""
Sweeping d_max
==============

Two big classes sit close together and a small one sits far away.
As d_max grows, the big classes start swallowing the small one, so
labeled accuracy peaks and then drops, while rejections vanish.
"""
import numpy as np

from flexknn import clusters, parse_grid, sweep_dmax

sc = clusters(
    [[0, 0, 0], [3, 0, 0], [1.5, 8, 0]],
    [0.8, 0.8, 0.5],
    [300, 300, 20],
    test_counts=[100, 100, 40],
    seed=7,
    names=["big1", "big2", "small"],
)
sweep = sweep_dmax(sc.train, sc.test, parse_grid("0.25:0.25:12"))

print(f"{'d_max':>6} {'labeled':>8} {'rejected':>9} {'composite':>10} {'mean K':>8}")
for d_max, r in sweep.rows:
    bar = "#" * int(40 * r.labeled_accuracy_all)
    print(
        f"{d_max:6.2f} {r.labeled_accuracy_all:8.3f} {r.rejection_rate:9.3f} "
        f"{r.composite_accuracy:10.3f} {r.mean_k:8.1f} {bar}"
    )

acc = sweep.column("labeled_accuracy_all")
best = int(np.argmax(acc))
print(f"\nbest d_max {sweep.grid[best]} with {acc[best]:.3f}; at the end of the grid {acc[-1]:.3f}")

# same table as CSV, ready for a spreadsheet
print(sweep.to_csv().splitlines()[0])
