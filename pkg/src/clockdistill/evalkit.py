"""Detection, recognition and end-to-end scoring of clock text.

Predictions are matched to ground truth greedily by descending IoU, one to one.
Metrics are reported for two scopes: every ground-truth box, or only the
semantic ones (team, time, period). Precision and recall are micro-averaged
over the corpus unless ``EvalConfig.macro`` is set; a ratio with a zero
denominator is reported as 0.0.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptyEvalSet
from .geometry import iou_matrix
from .model import SEMANTIC_CLASSES, Box, SemanticClass, canonicalize

DEFAULT_THRESHOLDS = (0.5, 0.6, 0.7, 0.8, 0.9)


class ClassScope(str, Enum):
    SEMANTIC_ONLY = "semantic_only"
    ALL_CLASSES = "all_classes"


@dataclass(frozen=True)
class EvalConfig:
    iou_thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    class_scope: ClassScope = ClassScope.ALL_CLASSES
    macro: bool = False

    def __post_init__(self):
        th = tuple(float(t) for t in self.iou_thresholds)
        if not th:
            raise ValueError("at least one IoU threshold is required")
        if any(not (0.0 < t <= 1.0) for t in th):
            raise ValueError(f"IoU thresholds must lie in (0, 1], got {th}")
        object.__setattr__(self, "iou_thresholds", tuple(sorted(set(th))))
        object.__setattr__(self, "class_scope", ClassScope(self.class_scope))


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    matched_pairs: tuple[tuple[int, int, float], ...] = ()


def _match(ious: np.ndarray, threshold: float) -> MatchResult:
    n_pred, n_gt = ious.shape
    pi, gi = np.nonzero(ious >= threshold)
    vals = ious[pi, gi]
    order = np.lexsort((gi, pi, -vals))
    used_p, used_g = set(), set()
    pairs = []
    for k in order:
        p, g = int(pi[k]), int(gi[k])
        if p in used_p or g in used_g:
            continue
        used_p.add(p)
        used_g.add(g)
        pairs.append((p, g, float(vals[k])))
    tp = len(pairs)
    return MatchResult(tp, n_pred - tp, n_gt - tp, tuple(pairs))


def match_boxes(preds: Sequence[Box], gts: Sequence[Box], threshold: float) -> MatchResult:
    """Greedy one-to-one matching in descending IoU order.

    Ties are broken by prediction index, then ground-truth index. Pairs with
    IoU at or above ``threshold`` are true positives.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    return _match(iou_matrix(list(preds), list(gts)), threshold)


@dataclass
class EvalImage:
    """Predictions and ground truth for one clock crop."""

    pred_boxes: Sequence[Box]
    gt_boxes: Sequence[Box]
    gt_classes: Sequence[SemanticClass] | None = None
    pred_texts: Sequence[str] | None = None
    gt_texts: Sequence[str] | None = None
    image_id: str = ""
    _ious: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.gt_classes is None:
            self.gt_classes = [SemanticClass.OTHER] * len(self.gt_boxes)
        if len(self.gt_classes) != len(self.gt_boxes):
            raise ValueError("one class per ground-truth box required")
        for name, texts, boxes in (("pred", self.pred_texts, self.pred_boxes),
                                   ("gt", self.gt_texts, self.gt_boxes)):
            if texts is not None and len(texts) != len(boxes):
                raise ValueError(f"one {name} text per {name} box required")

    @property
    def ious(self) -> np.ndarray:
        if self._ious is None:
            self._ious = iou_matrix(list(self.pred_boxes), list(self.gt_boxes))
        return self._ious

    def scope_indices(self, scope: ClassScope) -> tuple[np.ndarray, np.ndarray]:
        """Prediction and ground-truth indices inside ``scope``.

        For the semantic scope a prediction belongs if the ground truth it
        overlaps most is semantic, or if it overlaps no ground truth at all
        (an unmatched prediction is a false positive in either scope).
        """
        n_pred, n_gt = len(self.pred_boxes), len(self.gt_boxes)
        if ClassScope(scope) is ClassScope.ALL_CLASSES:
            return np.arange(n_pred), np.arange(n_gt)
        sem = np.array([SemanticClass(c) in SEMANTIC_CLASSES for c in self.gt_classes], dtype=bool)
        gt_idx = np.flatnonzero(sem)
        if n_gt == 0:
            return np.arange(n_pred), gt_idx
        ious = self.ious
        best = ious.argmax(axis=1) if n_pred else np.zeros(0, dtype=int)
        keep = (ious.max(axis=1) <= 0) | sem[best] if n_pred else np.zeros(0, dtype=bool)
        return np.flatnonzero(keep), gt_idx


def match_image(img: EvalImage, threshold: float, scope: ClassScope = ClassScope.ALL_CLASSES):
    """Match within ``scope``; pair indices refer to the full image lists."""
    p_idx, g_idx = img.scope_indices(scope)
    sub = img.ious[np.ix_(p_idx, g_idx)] if len(p_idx) and len(g_idx) else np.zeros((len(p_idx), len(g_idx)))
    m = _match(sub, threshold)
    pairs = tuple((int(p_idx[p]), int(g_idx[g]), v) for p, g, v in m.matched_pairs)
    return MatchResult(m.tp, m.fp, m.fn, pairs)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


class PR(NamedTuple):
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int


def _aggregate(results: Sequence[tuple[int, int, int]], macro: bool) -> PR:
    tp = sum(r[0] for r in results)
    fp = sum(r[1] for r in results)
    fn = sum(r[2] for r in results)
    if not macro:
        return PR(_ratio(tp, tp + fp), _ratio(tp, tp + fn), tp, fp, fn)
    # per-image ratios; images with an empty denominator do not vote
    ps = [r[0] / (r[0] + r[1]) for r in results if r[0] + r[1]]
    rs = [r[0] / (r[0] + r[2]) for r in results if r[0] + r[2]]
    return PR(float(np.mean(ps)) if ps else 0.0, float(np.mean(rs)) if rs else 0.0, tp, fp, fn)


def _require(images: Sequence[EvalImage]) -> list[EvalImage]:
    images = list(images)
    if not images:
        raise EmptyEvalSet("evaluation set is empty")
    return images


def detection_pr(images: Iterable[EvalImage], config: EvalConfig = EvalConfig()) -> dict[float, PR]:
    """Detection precision and recall at every configured IoU threshold."""
    images = _require(images)
    out = {}
    for th in config.iou_thresholds:
        ms = [match_image(img, th, config.class_scope) for img in images]
        out[th] = _aggregate([(m.tp, m.fp, m.fn) for m in ms], config.macro)
    return out


class RecognitionResult(NamedTuple):
    accuracy: float
    correct: int
    incorrect: int


def recognition_accuracy(pairs: Iterable[tuple[str, str]]) -> RecognitionResult:
    """Exact full-string accuracy after canonicalization; partial matches count as wrong."""
    correct = incorrect = 0
    for pred, gt in pairs:
        if canonicalize(pred) == canonicalize(gt):
            correct += 1
        else:
            incorrect += 1
    return RecognitionResult(_ratio(correct, correct + incorrect), correct, incorrect)


def _texts(img: EvalImage) -> tuple[Sequence[str], Sequence[str]]:
    if img.pred_texts is None or img.gt_texts is None:
        raise ValueError(f"image {img.image_id!r} lacks prediction or ground-truth strings")
    return img.pred_texts, img.gt_texts


def matched_text_pairs(img: EvalImage, threshold: float,
                       scope: ClassScope = ClassScope.ALL_CLASSES) -> list[tuple[str, str]]:
    pred_t, gt_t = _texts(img)
    return [(pred_t[p], gt_t[g]) for p, g, _ in match_image(img, threshold, scope).matched_pairs]


def e2e_metrics(images: Iterable[EvalImage], config: EvalConfig = EvalConfig()) -> dict[float, PR]:
    """End-to-end P/R: a true positive needs an IoU match and an exact string."""
    images = _require(images)
    out = {}
    for th in config.iou_thresholds:
        results = []
        for img in images:
            pred_t, gt_t = _texts(img)
            m = match_image(img, th, config.class_scope)
            tp = sum(canonicalize(pred_t[p]) == canonicalize(gt_t[g]) for p, g, _ in m.matched_pairs)
            results.append((tp, m.tp + m.fp - tp, m.tp + m.fn - tp))
        out[th] = _aggregate(results, config.macro)
    return out


METRIC_COLUMNS = ("iou", "p_sc", "r_sc", "p_ac", "r_ac", "acc_sc", "acc_ac",
                  "p_e2e_sc", "r_e2e_sc", "p_e2e_ac", "r_e2e_ac")


def metrics_table(images: Iterable[EvalImage], config: EvalConfig = EvalConfig()) -> list[dict[str, float]]:
    """One row per threshold covering both scopes.

    Recognition accuracy at a threshold is measured over the box pairs matched
    at that threshold.
    """
    images = _require(images)
    scoped = {}
    for tag, scope in (("sc", ClassScope.SEMANTIC_ONLY), ("ac", ClassScope.ALL_CLASSES)):
        cfg = EvalConfig(config.iou_thresholds, scope, config.macro)
        scoped[tag] = (detection_pr(images, cfg), e2e_metrics(images, cfg), scope)
    rows = []
    for th in config.iou_thresholds:
        row = {"iou": th}
        for tag, (det, e2e, scope) in scoped.items():
            row[f"p_{tag}"], row[f"r_{tag}"] = det[th].precision, det[th].recall
            pairs = [pair for img in images for pair in matched_text_pairs(img, th, scope)]
            row[f"acc_{tag}"] = recognition_accuracy(pairs).accuracy
            row[f"p_e2e_{tag}"], row[f"r_e2e_{tag}"] = e2e[th].precision, e2e[th].recall
        rows.append({k: row[k] for k in METRIC_COLUMNS})
    return rows


def metrics_csv(rows: Sequence[dict[str, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for r in rows:
        w.writerow([f"{r[c]:.6g}" if c == "iou" else f"{r[c]:.6f}" for c in METRIC_COLUMNS])
    return buf.getvalue()
