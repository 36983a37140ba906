"""Box geometry and grid-constrained resizing.

Detectors with a stride-32 backbone need inputs whose sides are multiples of
32. Three ways to get there are compared here: always round up, always round
down, and the amalgamated rule which rounds each axis independently to
whichever neighbouring multiple distorts it least (ties go up).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, NonPositiveDimension, NonPositiveScale
from .model import Box


class Strategy(str, Enum):
    UP_ONLY = "up_only"
    DOWN_ONLY = "down_only"
    AMALGAMATED = "amalgamated"


def iou(a: Box, b: Box) -> float:
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return min(1.0, inter / union)


def iou_matrix(preds: Sequence[Box], gts: Sequence[Box]) -> np.ndarray:
    """Pairwise IoU, shape ``(len(preds), len(gts))``."""
    if not preds or not gts:
        return np.zeros((len(preds), len(gts)))
    p = np.array([b.as_tuple() for b in preds], dtype=float)
    g = np.array([b.as_tuple() for b in gts], dtype=float)
    lt = np.maximum(p[:, None, :2], g[None, :, :2])
    rb = np.minimum(p[:, None, 2:], g[None, :, 2:])
    wh = np.clip(rb - lt, 0, None)
    inter = wh[..., 0] * wh[..., 1]
    area_p = (p[:, 2] - p[:, 0]) * (p[:, 3] - p[:, 1])
    area_g = (g[:, 2] - g[:, 0]) * (g[:, 3] - g[:, 1])
    union = area_p[:, None] + area_g[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    return np.clip(out, 0.0, 1.0)


def scale_box(b: Box, sx: float, sy: float) -> Box:
    if not (sx > 0 and sy > 0):
        raise NonPositiveScale(f"scales must be > 0, got ({sx}, {sy})")
    return Box(b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy)


def grid_dims(x, grid: int = 32, strategy: Strategy = Strategy.AMALGAMATED) -> np.ndarray:
    """Vectorised per-axis resize of positive lengths ``x`` to multiples of ``grid``.

    Lengths below one grid cell always become ``grid``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise NonPositiveDimension("dimensions must be > 0")
    if grid < 1:
        raise ValueError("grid must be >= 1")
    down = np.maximum(grid, np.floor(x / grid) * grid)
    up = np.maximum(grid, np.ceil(x / grid) * grid)
    strategy = Strategy(strategy)
    if strategy is Strategy.UP_ONLY:
        return up
    if strategy is Strategy.DOWN_ONLY:
        return down
    return np.where(x - down < up - x, down, up)


def axis_distortion(orig, resized) -> np.ndarray:
    orig = np.asarray(orig, dtype=float)
    return np.abs(np.asarray(resized, dtype=float) - orig) / orig


def aspect_distortion(w, h, w2, h2) -> np.ndarray:
    w, h, w2, h2 = (np.asarray(v, dtype=float) for v in (w, h, w2, h2))
    return np.abs((w2 / h2) * (h / w) - 1.0)


@dataclass(frozen=True)
class ResizeDecision:
    original: tuple[float, float]
    resized: tuple[int, int]
    per_dim_distortion: tuple[float, float]
    aspect_distortion: float


def resize_to_grid(w: float, h: float, grid: int = 32,
                   strategy: Strategy = Strategy.AMALGAMATED) -> ResizeDecision:
    """Pick target dimensions for a ``w`` x ``h`` crop.

    >>> resize_to_grid(100, 50).resized
    (96, 64)
    """
    if not (w > 0 and h > 0):
        raise NonPositiveDimension(f"dimensions must be > 0, got ({w}, {h})")
    w2, h2 = (int(v) for v in grid_dims([w, h], grid, strategy))
    return ResizeDecision(
        original=(w, h),
        resized=(w2, h2),
        per_dim_distortion=(abs(w2 - w) / w, abs(h2 - h) / h),
        aspect_distortion=float(aspect_distortion(w, h, w2, h2)),
    )


def width_bucket_edges(widths: Sequence[float], step: float = 64.0) -> np.ndarray:
    lo = np.floor(min(widths) / step) * step
    hi = (np.floor(max(widths) / step) + 1) * step
    return np.arange(lo, hi + step / 2, step)


@dataclass(frozen=True)
class StrategyRow:
    size_bucket: str
    strategy: Strategy
    n: int
    mean_distortion: float
    best_count: int
    mean_axis_distortion: float


@dataclass(frozen=True)
class StrategyTable:
    rows: tuple[StrategyRow, ...]
    totals: dict

    def best_counts(self) -> dict[Strategy, int]:
        return {s: self.totals[s]["best_count"] for s in Strategy}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size_bucket", "strategy", "mean_distortion", "best_count", "mean_axis_distortion"])
        for r in self.rows:
            w.writerow([r.size_bucket, r.strategy.value, f"{r.mean_distortion:.6f}", r.best_count,
                        f"{r.mean_axis_distortion:.6f}"])
        return buf.getvalue()


def compare_strategies(sizes: Iterable[tuple[float, float]], grid: int = 32,
                       bucket_edges: Sequence[float] | None = None) -> StrategyTable:
    """Aspect-ratio distortion of each resize strategy, bucketed by width.

    ``best_count`` counts sizes where a strategy's aspect distortion is
    strictly lower than both others. ``mean_axis_distortion`` averages the two
    per-axis relative deviations.
    """
    arr = np.asarray(list(sizes), dtype=float).reshape(-1, 2)
    if len(arr) == 0:
        raise EmptyInput("no sizes given")
    w, h = arr[:, 0], arr[:, 1]
    edges = np.asarray(bucket_edges if bucket_edges is not None else width_bucket_edges(w), dtype=float)

    aspect = {}
    axis = {}
    for s in Strategy:
        w2, h2 = grid_dims(w, grid, s), grid_dims(h, grid, s)
        aspect[s] = aspect_distortion(w, h, w2, h2)
        axis[s] = (axis_distortion(w, w2) + axis_distortion(h, h2)) / 2.0
    strict = {}
    for s in Strategy:
        others = [aspect[o] for o in Strategy if o is not s]
        strict[s] = (aspect[s] < others[0]) & (aspect[s] < others[1])

    bucket = np.clip(np.searchsorted(edges, w, side="right") - 1, 0, len(edges) - 2)
    rows = []
    for b in range(len(edges) - 1):
        mask = bucket == b
        if not mask.any():
            continue
        label = f"[{edges[b]:g},{edges[b + 1]:g})"
        for s in Strategy:
            rows.append(StrategyRow(label, s, int(mask.sum()), float(aspect[s][mask].mean()),
                                    int(strict[s][mask].sum()), float(axis[s][mask].mean())))
    totals = {
        s: {"mean_distortion": float(aspect[s].mean()), "best_count": int(strict[s].sum()),
            "mean_axis_distortion": float(axis[s].mean())}
        for s in Strategy
    }
    return StrategyTable(tuple(rows), totals)
