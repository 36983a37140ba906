"""Flatten a skewed crop-size distribution with planned rescales.

Run: python3 demos/plan_size_augmentation.py
"""

import numpy as np

from clockdistill.augment import build_histogram, plan_augmentation, plan_label_correction, replay_plan

rng = np.random.default_rng(0)
# most crops are large, a few are small
widths = np.concatenate([rng.normal(420, 30, 400), rng.normal(180, 40, 60)])
sizes = [(float(w), float(w) / 6) for w in widths]
hist = build_histogram(sizes, n_buckets=6)
plans = plan_augmentation(hist, sizes, rng_seed=0, scale_range=(0.4, 1.2))
after = build_histogram(replay_plan(sizes, plans), edges=hist.edges)

print("bucket edges:", np.round(hist.edges, 1))
print("before:", hist.counts, f"variance {hist.density_variance():.4f}")
print("after: ", after.counts, f"variance {after.density_variance():.4f}")
moved = [p for p in plans if p.scale != 1.0]
print(f"{len(moved)} crops rescaled, scales in [{min(p.scale for p in moved):.2f}, "
      f"{max(p.scale for p in moved):.2f}]")

# a new league's crops mapped onto the labelled league's modal size and back
source = (hist, build_histogram(sizes, axis="height", n_buckets=6))
fix = plan_label_correction(source, [(200, 40)])[0]
print("label correction for a 200x40 crop:", np.round(fix.forward, 3), np.round(fix.inverse, 3))
