"""Size histograms, augmentation planning, sampling and label correction."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clockdistill.augment import (
    Axis, BucketHistogram, build_histogram, plan_augmentation, plan_label_correction, replay_plan,
    stratified_sample,
)
from clockdistill.errors import InfeasibleConfiguration
from clockdistill.geometry import scale_box
from clockdistill.model import Box


def test_identical_sizes_fill_one_bucket():
    assert build_histogram([(10, 5)] * 10).counts == (10,)


def test_counts_are_conserved_across_an_edge():
    hist = build_histogram([(90, 1)] * 3 + [(110, 1)] * 4, edges=[0, 100, 200])
    assert hist.counts == (3, 4) and hist.total == 7


def test_out_of_range_values_are_clipped_and_listed():
    hist = build_histogram([(-5, 1), (50, 1), (300, 1)], edges=[0, 100, 200])
    assert hist.counts == (2, 1) and hist.clipped == (0, 2)


def test_height_axis():
    assert build_histogram([(10, 150), (10, 50)], edges=[0, 100, 200], axis=Axis.HEIGHT).counts == (1, 1)


def test_uniform_histogram_needs_no_scaling():
    sizes = [(50, 1), (150, 1)] * 5
    hist = build_histogram(sizes, edges=[0, 100, 200])
    assert all(p.scale == 1.0 for p in plan_augmentation(hist, sizes))


def _skewed(seed):
    rng = np.random.default_rng(seed)
    w = np.concatenate([rng.uniform(100, 200, 90), rng.uniform(0.5, 100, 10)])
    return [(float(x), 1.0) for x in w]


def test_skew_is_flattened_by_replay():
    sizes = _skewed(0)
    hist = build_histogram(sizes, edges=[0, 100, 200])
    plans = plan_augmentation(hist, sizes, rng_seed=0)
    after = build_histogram(replay_plan(sizes, plans), edges=[0, 100, 200])
    assert after.density_variance() <= hist.density_variance()
    assert np.all(np.abs(after.densities() - 0.5) <= 0.05)
    assert all(0.4 <= p.scale <= 1.2 for p in plans)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(1, 500), min_size=2, max_size=60), st.integers(0, 1000))
def test_plans_never_raise_variance_and_respect_range(widths, seed):
    sizes = [(w, 1.0) for w in widths]
    hist = build_histogram(sizes, n_buckets=4)
    plans = plan_augmentation(hist, sizes, rng_seed=seed, scale_range=(0.5, 1.5))
    assert all(0.5 <= p.scale <= 1.5 for p in plans)
    after = build_histogram(replay_plan(sizes, plans), edges=hist.edges)
    assert after.density_variance() <= hist.density_variance() + 1e-12
    assert plans == plan_augmentation(hist, sizes, rng_seed=seed, scale_range=(0.5, 1.5))


def test_scale_range_must_contain_one():
    hist = BucketHistogram((0.0, 1.0), (1,))
    with pytest.raises(InfeasibleConfiguration):
        plan_augmentation(hist, [(0.5, 1)], scale_range=(0.5, 0.9))


def test_stratified_sample():
    items = list(range(300))
    styles = [i % 3 for i in items]
    out = stratified_sample(items, styles, 10, rng_seed=4)
    assert len(out) == 30 and all(sum(1 for x in out if x % 3 == s) == 10 for s in range(3))
    assert out == stratified_sample(items, styles, 10, rng_seed=4)
    assert stratified_sample([1, 2, 3, 4], ["a"] * 4, 10) == [1, 2, 3, 4]


def _modal_hist(center, width=40.0):
    return BucketHistogram((center - width / 2, center + width / 2), (5,))


def test_label_correction_to_modal_size():
    source = (_modal_hist(400), _modal_hist(80))
    [fix] = plan_label_correction(source, [(200, 40)])
    assert fix.forward == pytest.approx((2.0, 2.0)) and fix.inverse == pytest.approx((0.5, 0.5))
    [same] = plan_label_correction(source, [(400, 80)])
    assert same.forward == (1.0, 1.0)


@given(st.floats(10, 1000), st.floats(10, 1000))
def test_label_correction_round_trip(w, h):
    [fix] = plan_label_correction((_modal_hist(400), _modal_hist(80)), [(w, h)])
    b = Box(1.5, 2.5, 7.0, 9.0)
    back = scale_box(scale_box(b, *fix.forward), *fix.inverse)
    assert np.allclose(back.as_tuple(), b.as_tuple(), rtol=1e-9)
