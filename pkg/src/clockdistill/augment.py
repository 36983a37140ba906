"""Size-bias correction for clock crops.

Broadcast clocks from one league cluster around a handful of sizes, so a
detector trained on them sees some scales far more than others. The planner
here measures population density over size buckets and assigns each crop an
isotropic rescale that moves mass from crowded buckets into sparse ones. It
only plans; applying the scales to pixels is left to an image job.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateHistogram, EmptyInput, InfeasibleConfiguration

# relative margin keeping a drawn size strictly inside its bucket
_EDGE_MARGIN = 1e-9


class Axis(str, Enum):
    WIDTH = "width"
    HEIGHT = "height"
    TEXT_BOX_WIDTH = "text_box_width"
    TEXT_BOX_HEIGHT = "text_box_height"

    @property
    def column(self) -> int:
        """Index into a ``(w, h)`` pair."""
        return 0 if self in (Axis.WIDTH, Axis.TEXT_BOX_WIDTH) else 1


@dataclass(frozen=True)
class BucketHistogram:
    """Counts of sizes per bucket along one axis.

    Bucket ``i`` covers ``[edges[i], edges[i+1])``; the last bucket also
    includes its right edge. ``clipped`` lists input positions whose value
    fell outside the edges and was counted in the nearest boundary bucket.
    """

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    axis: Axis = Axis.WIDTH
    clipped: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.edges) < 2:
            raise ValueError("need at least two bucket edges")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError(f"edges must be strictly increasing, got {self.edges}")
        if len(self.counts) != len(self.edges) - 1:
            raise ValueError(f"{len(self.counts)} counts for {len(self.edges) - 1} buckets")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def n_buckets(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def densities(self) -> np.ndarray:
        c = np.asarray(self.counts, dtype=float)
        return c / c.sum() if c.sum() else c

    def density_variance(self) -> float:
        return float(np.var(self.densities()))

    def bucket_of(self, values) -> np.ndarray:
        """Bucket index for each value, clipping to the boundary buckets."""
        idx = np.searchsorted(np.asarray(self.edges), np.asarray(values, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.n_buckets - 1)

    def bounds(self, i: int) -> tuple[float, float]:
        return self.edges[i], self.edges[i + 1]

    def center(self, i: int) -> float:
        lo, hi = self.bounds(i)
        return (lo + hi) / 2.0

    def modal_bucket(self) -> int:
        if not any(self.counts):
            raise DegenerateHistogram("histogram has no mass")
        return int(np.argmax(self.counts))

    def merge(self, other: "BucketHistogram") -> "BucketHistogram":
        if self.edges != other.edges or self.axis != other.axis:
            raise ValueError("can only merge histograms over the same axis and edges")
        return BucketHistogram(self.edges, tuple(a + b for a, b in zip(self.counts, other.counts)),
                               self.axis, self.clipped + other.clipped)


def default_edges(values, n_buckets: int = 8) -> np.ndarray:
    """``n_buckets`` equal-width buckets spanning the observed range."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.array([lo, lo + 1.0])
    return np.linspace(lo, hi, n_buckets + 1)


def _axis_values(sizes, axis: Axis) -> np.ndarray:
    arr = np.asarray(sizes, dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        raise EmptyInput("no sizes given")
    return arr[:, Axis(axis).column]


def build_histogram(sizes: Sequence[tuple[float, float]], edges: Sequence[float] | None = None,
                    axis: Axis = Axis.WIDTH, n_buckets: int = 8) -> BucketHistogram:
    """Histogram of one axis of ``(w, h)`` sizes.

    >>> build_histogram([(10, 5)] * 10).counts
    (10,)
    """
    axis = Axis(axis)
    x = _axis_values(sizes, axis)
    edges = np.asarray(edges if edges is not None else default_edges(x, n_buckets), dtype=float)
    clipped = np.flatnonzero((x < edges[0]) | (x > edges[-1]))
    hist = BucketHistogram(tuple(float(e) for e in edges), (0,) * (len(edges) - 1), axis)
    counts = np.bincount(hist.bucket_of(x), minlength=hist.n_buckets)
    return BucketHistogram(hist.edges, tuple(int(c) for c in counts), axis, tuple(int(i) for i in clipped))


class AugmentPlan(NamedTuple):
    index: int
    scale: float
    source_bucket: int
    target_bucket: int
    league_id: str = ""
    record_id: str = ""
    infeasible: bool = False


def _reachable(x: float, lo: float, hi: float, last: bool, s_min: float, s_max: float):
    """Scale interval taking ``x`` into ``[lo, hi)``, or ``None``."""
    pad = _EDGE_MARGIN * max(abs(lo), abs(hi), 1.0)
    a = max(s_min, (lo + pad) / x)
    b = min(s_max, (hi if last else hi - pad) / x)
    return (a, b) if a <= b else None


def plan_augmentation(hist: BucketHistogram, sizes: Sequence[tuple[float, float]], rng_seed: int = 0,
                      scale_range: tuple[float, float] = (0.4, 1.2), league_id: str = "",
                      record_ids: Sequence[str] | None = None) -> list[AugmentPlan]:
    """Assign each image a scale that moves mass toward a uniform histogram.

    Images are visited in a seeded random order. An image sitting in a bucket
    above the uniform target is sent to the emptiest under-populated bucket
    its scale range can reach, provided the donor still holds at least two
    more images than the receiver; this keeps every move variance-reducing.
    The scale is drawn uniformly from the interval landing it in that bucket.
    Everything else keeps ``scale = 1``; images in over-populated buckets that
    can reach no sparse bucket are flagged ``infeasible``.
    """
    s_min, s_max = map(float, scale_range)
    if not (0 < s_min < s_max):
        raise InfeasibleConfiguration(f"need 0 < s_min < s_max, got {scale_range}")
    if not s_min <= 1.0 <= s_max:
        raise InfeasibleConfiguration(f"scale range {scale_range} must contain 1 so unmoved images stay in range")
    x = _axis_values(sizes, hist.axis)
    if record_ids is not None and len(record_ids) != len(x):
        raise ValueError("record_ids must align with sizes")
    rng = np.random.default_rng(rng_seed)
    counts = np.bincount(hist.bucket_of(x), minlength=hist.n_buckets).astype(int)
    target = counts.sum() / hist.n_buckets
    src = hist.bucket_of(x)
    last = hist.n_buckets - 1

    plans: list[AugmentPlan | None] = [None] * len(x)
    for i in rng.permutation(len(x)):
        b = int(src[i])
        rid = record_ids[i] if record_ids is not None else ""
        if counts[b] <= target:
            plans[i] = AugmentPlan(int(i), 1.0, b, b, league_id, rid)
            continue
        wanted = [r for r in range(hist.n_buckets)
                  if r != b and counts[r] < target and counts[b] - counts[r] >= 2]
        options = []
        for r in wanted:
            interval = _reachable(x[i], *hist.bounds(r), r == last, s_min, s_max)
            if interval is not None:
                options.append((counts[r], abs(r - b), r, interval))
        if not options:
            plans[i] = AugmentPlan(int(i), 1.0, b, b, league_id, rid, infeasible=bool(wanted))
            continue
        _, _, r, (a, hi) = min(options, key=lambda o: o[:3])
        s = float(rng.uniform(a, hi)) if hi > a else a
        counts[b] -= 1
        counts[r] += 1
        plans[i] = AugmentPlan(int(i), s, b, r, league_id, rid)
    return plans


def replay_plan(sizes: Sequence[tuple[float, float]], plans: Sequence[AugmentPlan]) -> np.ndarray:
    """Sizes after applying each plan's isotropic scale."""
    arr = np.asarray(sizes, dtype=float).reshape(-1, 2)
    scales = np.ones(len(arr))
    for p in plans:
        scales[p.index] = p.scale
    return arr * scales[:, None]


def stratified_sample(items: Sequence, styles: Sequence[Hashable] | Callable[[object], Hashable],
                      k_per_style: int, rng_seed: int = 0) -> list:
    """Up to ``k_per_style`` items per style, drawn without replacement.

    Styles are visited in order of first appearance; within a style the
    sampled items keep their input order.
    """
    if k_per_style < 1:
        raise ValueError("k_per_style must be >= 1")
    labels = [styles(it) for it in items] if callable(styles) else list(styles)
    if len(labels) != len(items):
        raise ValueError("one style label per item required")
    groups: dict[Hashable, list[int]] = {}
    for i, s in enumerate(labels):
        groups.setdefault(s, []).append(i)
    rng = np.random.default_rng(rng_seed)
    out = []
    for idx in groups.values():
        if len(idx) > k_per_style:
            idx = sorted(rng.choice(idx, size=k_per_style, replace=False).tolist())
        out.extend(items[i] for i in idx)
    return out


class LabelCorrection(NamedTuple):
    forward: tuple[float, float]
    inverse: tuple[float, float]


def plan_label_correction(source: tuple[BucketHistogram, BucketHistogram],
                          target_sizes: Sequence[tuple[float, float]]) -> list[LabelCorrection]:
    """Per-axis scales mapping new-domain crops onto the labelled domain's modal size.

    ``source`` holds the labelled domain's width and height histograms. The
    forward scale resizes a target crop to the centres of the modal buckets;
    boxes predicted on the resized crop map back with ``inverse``.
    """
    w_hist, h_hist = source
    mw, mh = w_hist.center(w_hist.modal_bucket()), h_hist.center(h_hist.modal_bucket())
    arr = np.asarray(target_sizes, dtype=float).reshape(-1, 2)
    if np.any(arr <= 0):
        raise ValueError("target sizes must be positive")
    out = []
    for w, h in arr:
        fx, fy = float(mw / w), float(mh / h)
        out.append(LabelCorrection((fx, fy), (1.0 / fx, 1.0 / fy)))
    return out
