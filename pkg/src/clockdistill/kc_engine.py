"""Knowledge-constraint filtering of noisy clock OCR.

Records pass through four constraints:

* KC1 (existence): a clock must show two distinct teams, a period and a time.
  Failures are hard negatives for the clock detector.
* KC3 (priority): among several time candidates, keep the surface form the
  league profile ranks highest.
* KC2 (proximity): among several period candidates, keep the one nearest to
  the chosen time.
* KC4 (temporal): within a run of frames sharing teams and period, clock
  values must move monotonically and no faster than real time.

KC2/KC3 failures are counted in the KC4 column of the report, as the
published partition counts do.
"""

from __future__ import annotations

import gc
import json
import math
from collections import Counter, OrderedDict
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import NoQuarterCandidate, NoTimeCandidate
from .model import ClockRecord, GameClockReading, LeagueProfile, SemanticClass
from .surface_form import ClassifiedText, text_table, time_to_seconds

_EPS = 1e-9


class Kc4Mode(str, Enum):
    DISCARD = "discard"
    CORRECT = "correct"


class KcStatus(str, Enum):
    CLEAN_LABEL = "clean_label"
    REJECT_KC1 = "reject_kc1"
    REJECT_KC4 = "reject_kc4"
    CORRECTED_KC4 = "corrected_kc4"

    @property
    def is_clean(self) -> bool:
        return self in (KcStatus.CLEAN_LABEL, KcStatus.CORRECTED_KC4)


@dataclass(frozen=True)
class KcOutcome:
    record: ClockRecord
    status: KcStatus
    reading: GameClockReading | None = None
    reject_reason: str | None = None


_TEAM, _QUARTER, _TIME = SemanticClass.TEAM, SemanticClass.QUARTER, SemanticClass.TIME


class Kc1Result(NamedTuple):
    passed: bool
    detections: tuple
    hits: tuple
    reason: str | None = None

    @property
    def classified(self) -> tuple[ClassifiedText, ...]:
        return tuple(ClassifiedText(d, *h) for d, h in zip(self.detections, self.hits))

    def of(self, cls: SemanticClass) -> list[ClassifiedText]:
        return [c for c in self.classified if c.cls is cls]


class ReadingRejected(Exception):
    """A record passed KC1 but no unambiguous reading could be formed."""


def kc1_check(record: ClockRecord, profile: LeagueProfile) -> Kc1Result:
    """Existence check over the record's classified detections.

    Only time forms listed in the profile's priority count as times.
    Continuous-time leagues do not need a period text.
    """
    table = text_table(profile)
    dets = record.detections
    hits = tuple([table[d.raw_text] for d in dets])
    allowed = profile.time_form_priority
    teams = set()
    quarters = times = 0
    for cls, text, parsed, _ in hits:
        if cls is _TEAM:
            teams.add(text)
        elif cls is _QUARTER:
            quarters += 1
        elif cls is _TIME and parsed.form_id in allowed:
            times += 1
    if len(teams) >= 2 and times and (quarters or profile.continuous_time):
        return Kc1Result(True, dets, hits)
    missing = []
    if len(teams) < 2:
        missing.append(f"team texts ({len(teams)} of 2)")
    if not profile.continuous_time and quarters < 1:
        missing.append("quarter text")
    if times < 1:
        missing.append("time text")
    return Kc1Result(False, dets, hits, "kc1: missing " + ", ".join(missing))


def _reading_order(c: ClassifiedText):
    b = c.detection.box
    return (b.x_min, b.y_min)


def _distance(a: ClassifiedText, b: ClassifiedText) -> float:
    (ax, ay), (bx, by) = a.detection.box.center, b.detection.box.center
    return math.hypot(ax - bx, ay - by)


def kc2_resolve_quarter(quarters: Sequence[ClassifiedText], time: ClassifiedText) -> ClassifiedText:
    """Period candidate whose box centre is nearest the selected time's centre.

    Ties go to the smaller ``x_min``, then the smaller ``y_min``.
    """
    if not quarters:
        raise NoQuarterCandidate("no quarter candidates")
    if len(quarters) == 1:
        return quarters[0]
    return min(quarters, key=lambda q: (_distance(q, time), *_reading_order(q)))


def kc3_select_time(times: Sequence[ClassifiedText], profile: LeagueProfile) -> ClassifiedText:
    """Highest-priority time surface form; larger box wins among equals."""
    rank = profile.time_form_priority
    cands = [t for t in times if t.parsed_time is not None and t.parsed_time.form_id in rank]
    if not cands:
        raise NoTimeCandidate("no admissible time candidates")
    if len(cands) == 1:
        return cands[0]
    return min(cands, key=lambda t: (rank.index(t.parsed_time.form_id), -t.detection.box.area,
                                     *_reading_order(t)))


def extract_reading(record: ClockRecord, kc1: Kc1Result, profile: LeagueProfile) -> GameClockReading:
    """Build the reading for a KC1-passing record (KC3, then KC2)."""
    team_texts, quarter_cands, time_cands = [], [], []
    allowed = profile.time_form_priority
    for d, h in zip(kc1.detections, kc1.hits):
        cls = h[0]
        if cls is _TEAM:
            team_texts.append((d.box.x_min, d.box.y_min, h[1], d.box))
        elif cls is _QUARTER:
            quarter_cands.append(ClassifiedText(d, *h))
        elif cls is _TIME and h[2].form_id in allowed:
            time_cands.append(ClassifiedText(d, *h))
    team_texts.sort(key=lambda t: (t[0], t[1]))
    teams: list[str] = []
    team_boxes = []
    for _, _, text, box in team_texts:
        if text not in teams:
            teams.append(text)
            team_boxes.append(box)
    if len(teams) != 2:
        raise ReadingRejected(f"kc3: ambiguous teams {teams}")

    try:
        time = kc3_select_time(time_cands, profile)
    except NoTimeCandidate as exc:
        raise ReadingRejected(f"kc3: {exc}") from None
    boxes = {_TEAM: tuple(team_boxes), _TIME: (time.detection.box,)}

    quarter: int | str | None = None
    if quarter_cands:
        q = kc2_resolve_quarter(quarter_cands, time)
        quarter = q.text if profile.continuous_time else q.quarter_index
        boxes[_QUARTER] = (q.detection.box,)
    elif not profile.continuous_time:
        raise ReadingRejected("kc2: no quarter candidate")

    return GameClockReading(
        teams=(teams[0], teams[1]),
        quarter=quarter,
        time_s=time_to_seconds(time.parsed_time),
        source_frame_id=record.frame_id,
        source_boxes=boxes,
        video_id=record.video_id,
        frame_time_s=record.frame_time_s,
    )


def kc2_layout_check(readings: Sequence[GameClockReading], min_support: int = 3):
    """Split readings by whether their period text sits where the video usually shows it.

    A broadcast keeps its clock layout fixed, so within one team pair the
    period box stays put. The usual place is the modal box centre, binned at
    the box height; a reading whose period box centre lies outside the modal
    box is set aside. Returns ``(kept, misplaced)``; groups with fewer than
    ``min_support`` readings are kept whole.
    """
    groups: dict[tuple, list[GameClockReading]] = {}
    for r in readings:
        if _QUARTER in r.source_boxes:
            groups.setdefault(r.teams, []).append(r)
    misplaced = set()
    for group in groups.values():
        if len(group) < min_support:
            continue
        boxes = [r.source_boxes[_QUARTER][0] for r in group]
        counts = Counter(boxes)  # a fixed layout repeats the same few boxes
        bin_of = {}
        bins = Counter()
        for b, n in counts.items():
            (cx, cy), h = b.center, max(b.height, 1.0)
            bin_of[b] = (round(cx / h), round(cy / h))
            bins[bin_of[b]] += n
        mode_bin = bins.most_common(1)[0][0]
        members = [(b, n) for b, n in counts.items() if bin_of[b] == mode_bin]
        total = sum(n for _, n in members)
        mx = sum(b.center[0] * n for b, n in members) / total
        my = sum(b.center[1] * n for b, n in members) / total
        hw = sum(b.width * n for b, n in members) / (2 * total)
        hh = sum(b.height * n for b, n in members) / (2 * total)
        away = {b for b in counts if abs(b.center[0] - mx) > hw or abs(b.center[1] - my) > hh}
        if away:
            misplaced.update(id(r) for r, b in zip(group, boxes) if b in away)
    if not misplaced:
        return list(readings), []
    return [r for r in readings if id(r) not in misplaced], [r for r in readings if id(r) in misplaced]


def _fast_reading(record: ClockRecord, profile: LeagueProfile, table) -> GameClockReading | None:
    """Reading for the common clock: two team texts, at most one period, one admissible time.

    Returns ``None`` whenever anything else is seen, so the caller falls back
    to :func:`kc1_check` and :func:`extract_reading`, which give the same
    answer on the cases handled here.
    """
    allowed = profile.time_form_priority
    team_a = team_b = quarter = time = None
    for d in record.detections:
        h = table[d.raw_text]
        cls = h[0]
        if cls is _TEAM:
            if team_a is None:
                team_a = (d, h[1])
            elif team_b is None:
                team_b = (d, h[1])
            else:
                return None
        elif cls is _QUARTER:
            if quarter is not None:
                return None
            quarter = (d, h)
        elif cls is _TIME and h[2].form_id in allowed:
            if time is not None:
                return None
            time = (d, h)
    if team_b is None or time is None or team_a[1] == team_b[1]:
        return None
    cont = profile.continuous_time
    if quarter is None and not cont:
        return None
    (da, ta), (db, tb) = team_a, team_b
    if (db.box.x_min, db.box.y_min) < (da.box.x_min, da.box.y_min):
        (da, ta), (db, tb) = (db, tb), (da, ta)
    boxes = {_TEAM: (da.box, db.box), _TIME: (time[0].box,)}
    q = None
    if quarter is not None:
        q = quarter[1][1] if cont else quarter[1][3]
        boxes[_QUARTER] = (quarter[0].box,)
    return GameClockReading((ta, tb), q, time_to_seconds(time[1][2]), record.frame_id, boxes,
                            record.video_id, record.frame_time_s)


@dataclass
class Kc4Result:
    readings: list[GameClockReading]
    corrected: set[int] = field(default_factory=set)
    rejected: list[tuple[GameClockReading, str]] = field(default_factory=list)
    short_runs: list[tuple[int, ...]] = field(default_factory=list)


def _compatibility(profile: LeagueProfile):
    sign = profile.monotonic_direction.sign
    rate, tol = profile.max_clock_rate, profile.rate_tolerance_s + _EPS

    def ok(a: GameClockReading, b: GameClockReading) -> bool:
        delta = b.time_s - a.time_s
        if sign * delta < -_EPS:
            return False
        if rate is not None:
            ta, tb = a.frame_time_s, b.frame_time_s
            if ta is not None and tb is not None:
                elapsed = tb - ta if tb > ta else 0.0
                if abs(delta) > rate * elapsed + tol:
                    return False
        return True

    return ok


def compatible(a: GameClockReading, b: GameClockReading, profile: LeagueProfile) -> bool:
    """Whether ``b`` may follow ``a`` within one run.

    Requires movement in the profile's direction (ties allowed) and, when both
    frame times are known, no more clock change than real time allows.
    """
    return _compatibility(profile)(a, b)


def _interpolate(prev: GameClockReading, mid: GameClockReading, nxt: GameClockReading) -> float:
    if None not in (prev.frame_time_s, mid.frame_time_s, nxt.frame_time_s) and nxt.frame_time_s > prev.frame_time_s:
        x0, x, x1 = prev.frame_time_s, mid.frame_time_s, nxt.frame_time_s
    else:
        x0, x, x1 = prev.source_frame_id, mid.source_frame_id, nxt.source_frame_id
    frac = (x - x0) / (x1 - x0) if x1 != x0 else 0.5
    return prev.time_s + (nxt.time_s - prev.time_s) * frac


def split_runs(readings: Sequence[GameClockReading], continuous: bool = False) -> list[list[GameClockReading]]:
    """Split at every change of teams or (for resetting clocks) period."""
    runs: list[list[GameClockReading]] = []
    last = None
    for r in readings:
        key = r.run_key(continuous)
        if runs and key == last:
            runs[-1].append(r)
        else:
            runs.append([r])
            last = key
    return runs


def _repair_key_glitches(seq, profile, mode, result, min_support):
    """Deal with team/period runs too short to verify; returns the remaining runs.

    A short run between two runs of one key is a misread of that key: it is
    re-keyed (``CORRECT``) or dropped (``DISCARD``). Any other short run is
    dropped, since no neighbouring frame can confirm it.
    """
    runs = split_runs(seq, profile.continuous_time)
    out: list[list[GameClockReading]] = []
    for n, run in enumerate(runs):
        if len(run) >= min_support:
            if out and out[-1][0].run_key(profile.continuous_time) == run[0].run_key(profile.continuous_time):
                out[-1].extend(run)
            else:
                out.append(run)
            continue
        before = out[-1][-1] if out else None
        after = runs[n + 1][0] if n + 1 < len(runs) else None
        cont = profile.continuous_time
        sandwiched = before is not None and after is not None and before.run_key(cont) == after.run_key(cont)
        if sandwiched and mode is Kc4Mode.CORRECT:
            for r in run:
                out[-1].append(replace(r, teams=before.teams, quarter=before.quarter))
                result.corrected.add(r.source_frame_id)
            continue
        reason = "kc4: short team/quarter change" if sandwiched else "kc4: team/quarter run too short to verify"
        result.rejected.extend((r, reason) for r in run)
    if not profile.continuous_time:
        out = _enforce_period_order(out, profile, result)
    return out


def _heaviest_chain(weights: Sequence[int], fits) -> set[int]:
    """Indices of the heaviest chain where ``fits(k, j)`` holds for consecutive members."""
    best = list(weights)
    back = [-1] * len(weights)
    for j in range(len(weights)):
        for k in range(j):
            if fits(k, j) and best[k] + weights[j] > best[j]:
                best[j] = best[k] + weights[j]
                back[j] = k
    j = max(range(len(weights)), key=lambda n: (best[n], -n))
    chain = set()
    while j != -1:
        chain.add(j)
        j = back[j]
    return chain


def _enforce_period_order(runs, profile, result):
    """Per team pair, periods never go backwards; keep the heaviest ordered chain of runs."""
    by_teams: dict[tuple, list[int]] = {}
    for n, run in enumerate(runs):
        by_teams.setdefault(run[0].run_key(False)[0], []).append(n)
    dropped = set()
    for idx in by_teams.values():
        quarters = [runs[n][0].quarter for n in idx]
        if len(idx) < 2 or not all(isinstance(q, int) for q in quarters):
            continue
        chain = _heaviest_chain([len(runs[n]) for n in idx], lambda k, j: quarters[k] <= quarters[j])
        dropped.update(n for m, n in enumerate(idx) if m not in chain)
    if not dropped:
        return runs
    out: list[list[GameClockReading]] = []
    for n, run in enumerate(runs):
        if n in dropped:
            result.rejected.extend((r, "kc4: period out of order") for r in run)
        elif out and out[-1][0].run_key(False) == run[0].run_key(False):
            out[-1].extend(run)
        else:
            out.append(run)
    return out


def _adjacent_ok(run: Sequence[GameClockReading], profile: LeagueProfile) -> list[bool]:
    """``compatible(run[k], run[k + 1])`` for every ``k``, vectorised."""
    t = np.fromiter((r.time_s for r in run), float, len(run))
    d = np.diff(t)
    good = profile.monotonic_direction.sign * d >= -_EPS
    if profile.max_clock_rate is not None:
        ft = np.array([np.nan if r.frame_time_s is None else r.frame_time_s for r in run], float)
        step = np.diff(ft)
        elapsed = np.where(step > 0, step, 0.0)
        within = np.abs(d) <= profile.max_clock_rate * elapsed + (profile.rate_tolerance_s + _EPS)
        good &= np.isnan(step) | within
    return good.tolist()


def _filter_run(run, profile, mode, result, min_support):
    # Pairwise compatibility of untouched neighbours comes from one vectorised
    # pass; only pairs involving an edited or skipped reading are re-checked.
    ok = _compatibility(profile)
    n = len(run)
    adj = _adjacent_ok(run, profile)
    work = list(run)
    edited: set[int] = set()

    def linked(j: int, k: int) -> bool:
        if k == j + 1 and j not in edited and k not in edited:
            return adj[j]
        return ok(work[j], work[k])

    # Sliding window. Next to a scene cut a bad reading can mimic the other
    # side of the cut, so a spike also needs both neighbours to agree with
    # their own outer neighbours. The right side may skip one frame so that
    # spikes two apart are both found; at the ends of a run there is nothing
    # to check against.
    kept = [0] if n else []
    for i in range(1, n - 1):
        p = kept[-1]
        if linked(p, i) and adj[i]:
            kept.append(i)
            continue
        prev, mid, nxt = work[p], work[i], work[i + 1]
        confirmed = (ok(prev, nxt)
                     and (len(kept) < 2 or linked(kept[-2], p))
                     and (i + 3 >= n or adj[i + 1] or ok(nxt, work[i + 3])))
        if not confirmed:
            kept.append(i)
        elif mode is Kc4Mode.DISCARD:
            result.rejected.append((mid, "kc4: temporal spike"))
        else:
            work[i] = replace(mid, time_s=_interpolate(prev, mid, nxt))
            edited.add(i)
            result.corrected.add(mid.source_frame_id)
            kept.append(i)
    if n > 1:
        kept.append(n - 1)

    segments: list[list[GameClockReading]] = []
    last = -1
    for k in kept:
        if segments and linked(last, k):
            segments[-1].append(work[k])
        else:
            segments.append([work[k]])
        last = k
    if len(segments) == 1:
        # nothing left in the run contradicts it
        return segments[0]
    supported = []
    for seg in segments:
        if len(seg) >= min_support:
            supported.append(seg)
        else:
            result.rejected.extend((r, "kc4: unsupported by neighbouring frames") for r in seg)
    if len(supported) <= 1:
        return supported[0] if supported else []

    # longest direction-consistent chain of segments
    sign = profile.monotonic_direction.sign
    chain = _heaviest_chain([len(seg) for seg in supported],
                            lambda k, j: sign * (supported[j][0].time_s - supported[k][-1].time_s) >= -_EPS)
    out = []
    for n, seg in enumerate(supported):
        if n in chain:
            out.extend(seg)
        else:
            result.rejected.extend((r, "kc4: segment breaks monotonicity") for r in seg)
    return out


def kc4_temporal_filter(seq: Sequence[GameClockReading], profile: LeagueProfile,
                        mode: Kc4Mode = Kc4Mode.DISCARD, min_support: int = 3) -> Kc4Result:
    """Temporal consistency filter over one video's frame-ordered readings.

    Team/period runs shorter than ``min_support`` are repaired when they sit
    between two runs of one key and dropped otherwise. Each remaining run is
    scanned with a 3-frame window: a middle reading incompatible with its
    neighbours, while the neighbours agree with each other and with their
    outer neighbours, is a spike and is interpolated (``CORRECT``) or dropped
    (``DISCARD``). Stretches not confirmed by ``min_support`` mutually
    compatible frames are dropped, and of the rest the longest
    direction-consistent chain is kept, so every surviving run is monotone.
    A sequence of fewer than three readings passes through unchanged and is
    listed in ``short_runs``.
    """
    mode = Kc4Mode(mode)
    result = Kc4Result(readings=[])
    seq = list(seq)
    if len(seq) < 3:
        result.short_runs.append(tuple(r.source_frame_id for r in seq))
        result.readings.extend(seq)
        return result
    for run in _repair_key_glitches(seq, profile, mode, result, min_support):
        result.readings.extend(_filter_run(run, profile, mode, result, min_support))
    return result


_COUNT_KEYS = ("noisy_total", "clean", "corrected", "rejected_kc1", "rejected_kc4")
_STATUS_COLUMN = {
    KcStatus.CLEAN_LABEL: "clean",
    KcStatus.CORRECTED_KC4: "clean",
    KcStatus.REJECT_KC1: "rejected_kc1",
    KcStatus.REJECT_KC4: "rejected_kc4",
}


@dataclass
class DistillReport:
    noisy_total: int = 0
    clean: int = 0
    corrected: int = 0
    rejected_kc1: int = 0
    rejected_kc4: int = 0
    short_runs: int = 0
    per_video: dict[str, dict[str, int]] = field(default_factory=OrderedDict)
    hard_negative_ids: list[str] = field(default_factory=list)

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[KcOutcome], short_runs: int = 0) -> "DistillReport":
        rep = cls(short_runs=short_runs)
        tally = Counter((o.record.video_id, o.status) for o in outcomes)
        for (vid, status), n in tally.items():
            counts = rep.per_video.setdefault(vid, dict.fromkeys(_COUNT_KEYS, 0))
            cols = ["noisy_total", _STATUS_COLUMN[status]]
            if status is KcStatus.CORRECTED_KC4:
                cols.append("corrected")
            for k in cols:
                counts[k] += n
                setattr(rep, k, getattr(rep, k) + n)
        rep.hard_negative_ids = [o.record.record_id for o in outcomes if o.status is KcStatus.REJECT_KC1]
        return rep

    def merge(self, other: "DistillReport") -> "DistillReport":
        out = DistillReport()
        for k in (*_COUNT_KEYS, "short_runs"):
            setattr(out, k, getattr(self, k) + getattr(other, k))
        out.per_video = OrderedDict(self.per_video)
        for vid, counts in other.per_video.items():
            if vid in out.per_video:
                out.per_video[vid] = {k: out.per_video[vid][k] + counts[k] for k in _COUNT_KEYS}
            else:
                out.per_video[vid] = dict(counts)
        out.hard_negative_ids = self.hard_negative_ids + other.hard_negative_ids
        return out

    def is_partition(self) -> bool:
        return self.noisy_total == self.clean + self.rejected_kc1 + self.rejected_kc4

    def to_dict(self) -> dict:
        return {
            "noisy_total": self.noisy_total,
            "clean": self.clean,
            "corrected": self.corrected,
            "rejected_kc1": self.rejected_kc1,
            "rejected_kc4": self.rejected_kc4,
            "short_runs": self.short_runs,
            "per_video": {k: dict(v) for k, v in self.per_video.items()},
            "hard_negative_ids": list(self.hard_negative_ids),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def distill_video(records: Sequence[ClockRecord], profile: LeagueProfile,
                  mode: Kc4Mode = Kc4Mode.DISCARD) -> tuple[list[KcOutcome], int]:
    """KC1-KC4 over one video's frame-ordered records.

    Returns one outcome per record, in input order, and the number of runs
    too short for the temporal window.
    """
    outcomes: list[KcOutcome | None] = [None] * len(records)
    readings = []
    index_of: dict[int, int] = {}
    table = text_table(profile)
    for i, rec in enumerate(records):
        reading = _fast_reading(rec, profile, table)
        if reading is None:
            # uncommon layout or a failure: take the general path for the exact outcome
            kc1 = kc1_check(rec, profile)
            if not kc1.passed:
                outcomes[i] = KcOutcome(rec, KcStatus.REJECT_KC1, reject_reason=kc1.reason)
                continue
            try:
                reading = extract_reading(rec, kc1, profile)
            except ReadingRejected as exc:
                outcomes[i] = KcOutcome(rec, KcStatus.REJECT_KC4, reject_reason=str(exc))
                continue
        readings.append(reading)
        index_of[rec.frame_id] = i

    if not profile.continuous_time:
        readings, misplaced = kc2_layout_check(readings)
        for reading in misplaced:
            i = index_of[reading.source_frame_id]
            outcomes[i] = KcOutcome(records[i], KcStatus.REJECT_KC4,
                                    reject_reason="kc2: quarter text away from its usual place")

    kc4 = kc4_temporal_filter(readings, profile, mode)
    for reading, reason in kc4.rejected:
        i = index_of[reading.source_frame_id]
        outcomes[i] = KcOutcome(records[i], KcStatus.REJECT_KC4, reject_reason=reason)
    for reading in kc4.readings:
        i = index_of[reading.source_frame_id]
        status = KcStatus.CORRECTED_KC4 if reading.source_frame_id in kc4.corrected else KcStatus.CLEAN_LABEL
        outcomes[i] = KcOutcome(records[i], status, reading=reading)
    return outcomes, len(kc4.short_runs)


class DistillResult(NamedTuple):
    outcomes: list[KcOutcome]
    report: DistillReport

    @property
    def clean(self) -> list[KcOutcome]:
        return [o for o in self.outcomes if o.status.is_clean]


def distill(videos: Mapping[str, Sequence[ClockRecord]] | Iterable[Sequence[ClockRecord]],
            profile: LeagueProfile, mode: Kc4Mode = Kc4Mode.DISCARD) -> DistillResult:
    """Partition noisy records into clean labels and KC1/KC4 rejects.

    ``videos`` holds each video's records in frame order, either as a mapping
    keyed by video id or as an iterable of per-video sequences.
    """
    streams = videos.values() if isinstance(videos, Mapping) else videos
    outcomes: list[KcOutcome] = []
    short = 0
    with _gc_paused():
        for records in streams:
            out, n_short = distill_video(list(records), profile, mode)
            outcomes.extend(out)
            short += n_short
    return DistillResult(outcomes, DistillReport.from_outcomes(outcomes, short))


@contextmanager
def _gc_paused():
    # batches allocate many acyclic, long-lived objects; cyclic GC passes over them are wasted
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()
