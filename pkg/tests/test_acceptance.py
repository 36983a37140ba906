"""Acceptance suite: one group of tests per numbered criterion.

Each test is tagged with ``criterion(n)``; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""

from __future__ import annotations

import time
from dataclasses import replace

import numpy as np
import pytest

from clockdistill.align import align_segments, alignment_stats, segment_readings
from clockdistill.augment import build_histogram, plan_augmentation, replay_plan
from clockdistill.evalkit import ClassScope, EvalConfig, EvalImage, detection_pr, e2e_metrics
from clockdistill.geometry import Strategy, compare_strategies, grid_dims, resize_to_grid
from clockdistill.kc_engine import Kc4Mode, KcStatus, distill, kc4_temporal_filter
from clockdistill.model import Box, GameClockReading, SemanticClass
from clockdistill.profiles import NBA, NFL, NHL, SOCCER
from clockdistill.synth import NoiseSpec, corrupt, generate_game
from fixtures import PARTITION_ROWS, partition_fixture

# ---------------------------------------------------------------- criterion 1


@pytest.mark.criterion(1)
@pytest.mark.parametrize("noisy,kc1,kc4,clean", PARTITION_ROWS.values(), ids=list(PARTITION_ROWS))
def test_published_rows_are_partitions(noisy, kc1, kc4, clean):
    assert noisy == kc1 + kc4 + clean


@pytest.mark.criterion(1)
@pytest.mark.parametrize("league", list(PARTITION_ROWS))
def test_partition_fixture_reproduces_row_exactly_under_one_second(league):
    profile = {"nba": NBA, "soccer": SOCCER}[league]
    noisy, kc1, kc4, clean = PARTITION_ROWS[league]
    videos = partition_fixture(profile, noisy, kc1, kc4)
    timings = []
    for _ in range(3):
        t0 = time.perf_counter()
        result = distill(videos, profile)
        timings.append(time.perf_counter() - t0)
    rep = result.report
    assert (rep.noisy_total, rep.rejected_kc1, rep.rejected_kc4, rep.clean) == (noisy, kc1, kc4, clean)
    assert rep.is_partition()
    # best of three, the usual way to time a deterministic workload on a shared machine
    assert min(timings) < 1.0, f"best of 3 runs took {min(timings):.3f}s"


# ---------------------------------------------------------------- criterion 2


def _clean_run(rng, profile, n):
    sign = profile.monotonic_direction.sign
    steps = rng.uniform(0.0, 1.0, size=n - 1) * (rng.random(n - 1) > 0.2)
    start = 600.0 if sign < 0 else 0.0
    values = start + sign * np.concatenate([[0.0], np.cumsum(steps)])
    quarter = None if profile.continuous_time else 2
    return [GameClockReading(("aaa", "bbb"), quarter, float(v), i, {}, "v", float(i))
            for i, v in enumerate(values)]


def _spike_positions(rng, n):
    out, i = [], 1
    while i < n - 1:
        if rng.random() < 0.15:
            out.append(i)
            i += 2
        else:
            i += 1
    return out


def _is_monotone(readings, profile):
    sign = profile.monotonic_direction.sign
    return all(sign * (b.time_s - a.time_s) >= -1e-9 for a, b in zip(readings, readings[1:]))


@pytest.mark.criterion(2)
@pytest.mark.parametrize("profile", [NBA, SOCCER], ids=["decreasing", "increasing"])
def test_kc4_monotone_and_restores_single_spikes(profile):
    violations = []
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        clean = _clean_run(rng, profile, int(rng.integers(3, 40)))
        spikes = _spike_positions(rng, len(clean))
        noisy = list(clean)
        for i in spikes:
            offset = float(rng.uniform(10, 120)) * (1 if rng.random() < 0.5 else -1)
            if clean[i].time_s + offset < 0:
                offset = -offset
            noisy[i] = replace(clean[i], time_s=clean[i].time_s + offset)

        disc = kc4_temporal_filter(noisy, profile, Kc4Mode.DISCARD)
        corr = kc4_temporal_filter(noisy, profile, Kc4Mode.CORRECT)
        for name, res in (("discard", disc), ("correct", corr)):
            if not _is_monotone(res.readings, profile):
                violations.append((seed, name, "not monotone"))

        kept = [r.source_frame_id for r in disc.readings]
        if kept != [r.source_frame_id for r in clean if r.source_frame_id not in spikes]:
            violations.append((seed, "discard", "dropped the wrong frames"))

        if corr.corrected != set(spikes):
            violations.append((seed, "correct", f"corrected {sorted(corr.corrected)} vs spikes {spikes}"))
        if [r.source_frame_id for r in corr.readings] != [r.source_frame_id for r in clean]:
            violations.append((seed, "correct", "lost frames"))
        for r, c in zip(corr.readings, clean):
            i = r.source_frame_id
            if i in spikes:
                lo, hi = sorted((clean[i - 1].time_s, clean[i + 1].time_s))
                if not lo - 1e-9 <= r.time_s <= hi + 1e-9:
                    violations.append((seed, "correct", f"frame {i} outside neighbour interval"))
            elif r.time_s != c.time_s:
                violations.append((seed, "correct", f"clean frame {i} altered"))
    assert not violations, violations[:5]


@pytest.mark.criterion(2)
@pytest.mark.parametrize("profile", [NBA, SOCCER], ids=["decreasing", "increasing"])
def test_kc4_output_monotone_on_arbitrary_noise(profile):
    bad = []
    for seed in range(1000):
        rng = np.random.default_rng(10_000 + seed)
        n = int(rng.integers(3, 30))
        values = rng.uniform(0, 700, size=n)
        times = np.cumsum(rng.integers(1, 3, size=n)).astype(float)
        quarter = None if profile.continuous_time else 1
        seq = [GameClockReading(("aaa", "bbb"), quarter, float(v), i, {}, "v", float(t))
               for i, (v, t) in enumerate(zip(values, times))]
        for mode in Kc4Mode:
            if not _is_monotone(kc4_temporal_filter(seq, profile, mode).readings, profile):
                bad.append((seed, mode))
    assert not bad, bad[:5]


# ---------------------------------------------------------------- criterion 3


@pytest.mark.criterion(3)
def test_resize_sweep_is_per_dimension_optimal_and_on_grid():
    x = np.arange(1, 2049, dtype=float)
    w, h = np.meshgrid(x, x, indexing="ij")
    w, h = w.ravel(), h.ravel()
    out = {s: (grid_dims(w, 32, s), grid_dims(h, 32, s)) for s in Strategy}
    aw, ah = out[Strategy.AMALGAMATED]
    assert np.all(aw % 32 == 0) and np.all(ah % 32 == 0)
    assert aw.min() >= 32 and ah.min() >= 32
    for s in (Strategy.UP_ONLY, Strategy.DOWN_ONLY):
        sw, sh = out[s]
        assert np.all(np.abs(aw - w) / w <= np.abs(sw - w) / w)
        assert np.all(np.abs(ah - h) / h <= np.abs(sh - h) / h)
    # the scalar entry point agrees with the vectorised sweep
    rng = np.random.default_rng(0)
    for k in rng.integers(0, len(w), size=200):
        assert resize_to_grid(w[k], h[k]).resized == (int(aw[k]), int(ah[k]))


# ---------------------------------------------------------------- criterion 4


def _clock_like_sizes():
    sizes = [(w, h) for w in range(200, 801) for h in range(1, w // 2 + 1)]
    return np.array(sizes, dtype=float)


@pytest.mark.criterion(4)
def test_amalgamated_has_most_strictly_best_aspect_cases():
    table = compare_strategies(_clock_like_sizes(), grid=32)
    counts = table.best_counts()
    assert counts[Strategy.AMALGAMATED] == max(counts.values()), counts


# ---------------------------------------------------------------- criterion 5


@pytest.mark.criterion(5)
@pytest.mark.parametrize("seed", range(5))
def test_augmentation_flattens_two_bucket_skew(seed):
    rng = np.random.default_rng(seed)
    widths = np.concatenate([rng.uniform(100, 200, 90), rng.uniform(0.5, 100, 10)])
    sizes = np.stack([widths, widths / 3], axis=1)
    hist = build_histogram(sizes, edges=[0, 100, 200])
    assert hist.counts == (10, 90)
    plans = plan_augmentation(hist, sizes, rng_seed=seed, scale_range=(0.4, 1.2))
    after = build_histogram(replay_plan(sizes, plans), edges=hist.edges)
    assert after.total == hist.total and not after.clipped
    assert after.density_variance() <= hist.density_variance()
    uniform = 1.0 / hist.n_buckets
    assert np.all(np.abs(after.densities() - uniform) <= 0.1 * uniform)
    assert all(0.4 <= p.scale <= 1.2 for p in plans)


# ---------------------------------------------------------------- criterion 6


def _aligned_segments(game, feed):
    cont = game.profile.continuous_time
    noisy, log = game.corrupt(NoiseSpec())
    assert not log and noisy == game.records
    result = distill({game.video_id: noisy}, game.profile)
    assert result.report.clean == len(noisy)
    readings = [o.reading for o in result.clean]
    return align_segments(segment_readings(readings, continuous=cont), feed, continuous=cont)


@pytest.mark.criterion(6)
@pytest.mark.parametrize("profile", [NBA, NFL, NHL, SOCCER], ids=lambda p: p.league_id)
@pytest.mark.parametrize("seed", range(3))
def test_alignment_round_trip(profile, seed):
    game = generate_game(profile, 400, seed=seed)
    stats = alignment_stats(_aligned_segments(game, game.feed))
    assert stats.aligned_pct == 100.0 and stats.n_unmatched == 0 and stats.n_ambiguous == 0
    rng = np.random.default_rng(seed)
    for k in (1, 2, 5):
        drop = set(rng.choice(len(game.feed), size=k, replace=False).tolist())
        feed = [e for i, e in enumerate(game.feed) if i not in drop]
        stats = alignment_stats(_aligned_segments(game, feed))
        assert stats.n_unmatched == k and stats.n_ambiguous == 0
        assert stats.n_aligned == stats.n_segments - k


# ---------------------------------------------------------------- criterion 7


def _shifted(dx):
    return Box(dx, 0, 10 + dx, 10)


def _hand_corpus():
    # IoU of a 10x10 box shifted by dx against the origin box is (10-dx)/(10+dx)
    gt = [Box(0, 0, 10, 10), Box(100, 0, 110, 10), Box(200, 0, 210, 10), Box(300, 0, 310, 10)]
    preds = [
        _shifted(0.5),                 # IoU 0.9048 -> TP up to 0.9
        Box(101.5, 0, 111.5, 10),      # IoU 0.7391 -> TP up to 0.7
        Box(203, 0, 213, 10),          # IoU 0.5385 -> TP at 0.5 only
        Box(500, 0, 510, 10),          # overlaps nothing -> FP everywhere
    ]
    texts_p = ["phx", "GS", "2nd", "junk"]
    texts_g = ["phx", "gs", "3rd", "12:00"]
    classes = [SemanticClass.TEAM, SemanticClass.TEAM, SemanticClass.QUARTER, SemanticClass.TIME]
    return [EvalImage(preds, gt, classes, texts_p, texts_g, "hand")]


# threshold -> (tp, fp, fn) for detection and for end-to-end
_HAND_EXPECTED = {
    0.5: ((3, 1, 1), (2, 2, 2)),
    0.6: ((2, 2, 2), (2, 2, 2)),
    0.7: ((2, 2, 2), (2, 2, 2)),
    0.8: ((1, 3, 3), (1, 3, 3)),
    0.9: ((1, 3, 3), (1, 3, 3)),
}


@pytest.mark.criterion(7)
def test_hand_corpus_exact_pr():
    images = _hand_corpus()
    det, e2e = detection_pr(images), e2e_metrics(images)
    for th, ((tp, fp, fn), (etp, efp, efn)) in _HAND_EXPECTED.items():
        d, e = det[th], e2e[th]
        assert (d.tp, d.fp, d.fn) == (tp, fp, fn), th
        assert (e.tp, e.fp, e.fn) == (etp, efp, efn), th
        assert d.precision == tp / (tp + fp) and d.recall == tp / (tp + fn)
        assert e.precision == etp / (etp + efp) and e.recall == etp / (etp + efn)


def _random_image(rng):
    n_gt, n_pred = int(rng.integers(0, 6)), int(rng.integers(0, 6))

    def boxes(n):
        xy = rng.uniform(0, 80, size=(n, 2))
        wh = rng.uniform(2, 30, size=(n, 2))
        return [Box(*xy[i], *(xy[i] + wh[i])) for i in range(n)]

    vocab = ["phx", "gs", "2nd", ":17.3", "4:38", "x"]
    gts = boxes(n_gt)
    # perturbed copies of some ground truths plus free boxes
    preds = []
    for b in gts[:n_pred]:
        d = rng.normal(0, 3, size=4)
        x0, y0 = b.x_min + d[0], b.y_min + d[1]
        preds.append(Box(max(0, x0), max(0, y0), max(0, x0) + b.width + abs(d[2]) + 0.5,
                         max(0, y0) + b.height + abs(d[3]) + 0.5))
    preds += boxes(n_pred - len(preds))
    classes = [SemanticClass(c) for c in rng.choice([c.value for c in SemanticClass], size=n_gt)]
    return EvalImage(preds, gts, classes,
                     [str(rng.choice(vocab)) for _ in preds], [str(rng.choice(vocab)) for _ in gts])


@pytest.mark.criterion(7)
@pytest.mark.parametrize("scope", list(ClassScope))
def test_threshold_monotonicity_and_e2e_dominance(scope):
    rng = np.random.default_rng(7)
    cfg = EvalConfig(class_scope=scope)
    bad = []
    for k in range(1000):
        images = [_random_image(rng) for _ in range(int(rng.integers(1, 4)))]
        det, e2e = detection_pr(images, cfg), e2e_metrics(images, cfg)
        ths = cfg.iou_thresholds
        for lo, hi in zip(ths, ths[1:]):
            if det[hi].tp > det[lo].tp or det[hi].precision > det[lo].precision + 1e-12 \
                    or det[hi].recall > det[lo].recall + 1e-12:
                bad.append((k, "threshold", lo, hi))
        for th in ths:
            if e2e[th].precision > det[th].precision + 1e-12 or e2e[th].recall > det[th].recall + 1e-12:
                bad.append((k, "e2e", th))
    assert not bad, bad[:5]


# ---------------------------------------------------------------- criterion 8


@pytest.mark.criterion(8)
@pytest.mark.parametrize("profile", [NBA, NFL, NHL, SOCCER], ids=lambda p: p.league_id)
@pytest.mark.parametrize("mode", list(Kc4Mode))
def test_no_false_cleans_under_noise(profile, mode):
    false_cleans, n_clean, n_total = [], 0, 0
    for seed in range(10):
        game = generate_game(profile, 300, seed=seed)
        spec = NoiseSpec(char_substitution_rate=0.05, time_spike_rate=0.05, seed=seed)
        noisy, log = corrupt(game.records, spec, roles=game.roles, continuous=profile.continuous_time)
        touched = {c.frame_id for c in log}
        truth = {r.source_frame_id: r for r in game.readings}
        result = distill({game.video_id: noisy}, profile, mode)
        for o in result.outcomes:
            n_total += 1
            if o.status is not KcStatus.CLEAN_LABEL:
                continue
            n_clean += 1
            t = truth[o.record.frame_id]
            if (o.reading.teams, o.reading.quarter, o.reading.time_s) != (t.teams, t.quarter, t.time_s):
                false_cleans.append((seed, o.record.frame_id, o.record.frame_id in touched))
    assert not false_cleans, false_cleans[:5]
    # the filter must still keep most of the data
    assert n_clean > 0.3 * n_total
