"""Compare grid-resize rules on wide scoreboard crops.

Run: python3 demos/resize_strategies.py
"""

import numpy as np

from clockdistill.geometry import Strategy, compare_strategies, resize_to_grid

for w, h in [(100, 50), (620, 64), (20, 10)]:
    d = resize_to_grid(w, h)
    print(f"{w}x{h} -> {d.resized[0]}x{d.resized[1]}  per-axis {d.per_dim_distortion[0]:.3f}/"
          f"{d.per_dim_distortion[1]:.3f}  aspect {d.aspect_distortion:.3f}")

sizes = np.array([(w, h) for w in range(200, 801, 4) for h in range(1, w // 2 + 1, 2)], dtype=float)
table = compare_strategies(sizes, bucket_edges=[200, 400, 600, 801])
print("\nstrategy      mean aspect  mean per-axis  strictly best")
for s in Strategy:
    t = table.totals[s]
    print(f"{s.value:13s} {t['mean_distortion']:11.4f}  {t['mean_axis_distortion']:13.4f}  {t['best_count']:13d}")
# the amalgamated rule is best on average but seldom uniquely best: it
# usually ties with whichever one-way rule rounds both axes its way
print()
print(table.to_csv())
