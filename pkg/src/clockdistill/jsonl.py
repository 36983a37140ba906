"""JSON Lines and profile-file (de)serialization.

Every reader validates against a strict wire schema (unknown keys are
errors) and raises :class:`SchemaError` carrying the 1-based line number and
a dotted field path. Every writer emits one compact JSON object per line with
a fixed key order, so output is byte-stable and re-ingests losslessly.

Record lines::

    {"video_id": "v1", "frame_id": 0, "frame_time_s": 0.0,
     "clock_box": {"x_min": 0, "y_min": 0, "x_max": 600, "y_max": 60},
     "detections": [{"box": {...}, "raw_text": "PHX", "confidence": 1.0}],
     "league_id": "nba", "clock_style": "wide"}

``league_id`` and ``clock_style`` are optional. A box may also be given as a
list of ``[x, y]`` corner points and is reduced to its axis-aligned hull.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Iterable, Iterator, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .align import AlignedSegment, PlayEvent, elapsed_to_game_clock
from .augment import AugmentPlan
from .errors import RecordInvalid, SchemaError
from .evalkit import EvalImage
from .kc_engine import KcOutcome, KcStatus
from .model import (Box, ClockRecord, Direction, GameClockReading, LeagueProfile, SemanticClass,
                    TextDetection, TimeFormId, canonicalize, record_violations)


class _Wire(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _BoxW(_Wire):
    x_min: float
    y_min: float
    x_max: float
    y_max: float


_BoxOrQuad = Union[_BoxW, list[tuple[float, float]]]


class _DetectionW(_Wire):
    box: _BoxOrQuad
    raw_text: str
    confidence: float = 1.0


class _RecordW(_Wire):
    video_id: str
    frame_id: int
    frame_time_s: float
    clock_box: _BoxOrQuad
    detections: list[_DetectionW] = Field(default_factory=list)
    league_id: str | None = None
    clock_style: str | None = None


class _ReadingW(_Wire):
    video_id: str = ""
    source_frame_id: int
    frame_time_s: float | None = None
    teams: tuple[str, str]
    quarter: int | str | None
    time_s: float
    source_boxes: dict[SemanticClass, list[_BoxW]] = Field(default_factory=dict)


class _OutcomeW(_Wire):
    record: _RecordW
    status: KcStatus
    reading: _ReadingW | None = None
    reject_reason: str | None = None


class _EventW(_Wire):
    game_id: str
    quarter: int | str | None
    time_s: float
    teams: tuple[str, str]
    action: str = ""
    players: list[str] = Field(default_factory=list)
    description: str = ""


class _FeedMetaW(_Wire):
    time_convention: Literal["remaining", "elapsed"] = "remaining"
    period_length_s: float | None = None


class _FeedHeaderW(_Wire):
    meta: _FeedMetaW


class _PlanW(_Wire):
    index: int
    record_id: str = ""
    scale: float = Field(gt=0)
    source_bucket: int
    target_bucket: int
    league_id: str = ""
    infeasible: bool = False


class _ProfileW(_Wire):
    team_lexicon: list[str]
    quarter_forms: list[str] = Field(default_factory=list)
    time_form_priority: list[TimeFormId]
    monotonic_direction: Direction = Direction.DECREASING
    continuous_time: bool = False
    grid: int = 32
    max_clock_rate: float | None = 1.0
    rate_tolerance_s: float = 1.0
    period_length_s: float | None = None


class _MetadataW(_Wire):
    bucket_edges: dict[str, list[float]] = Field(default_factory=dict)
    augment_ranges: dict[str, tuple[float, float]] = Field(default_factory=dict)
    clock_styles: list[str] = Field(default_factory=list)


class _ProfileFileW(_Wire):
    leagues: dict[str, _ProfileW]
    metadata: _MetadataW = Field(default_factory=_MetadataW)


# ---------------------------------------------------------------- helpers

def _loc_path(loc: Iterable[Any]) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        elif isinstance(part, str) and part.startswith(("function-", "list[", "tuple[", "union[")):
            continue
        else:
            out += f".{part}" if out else str(part)
    return out


def _validate(model: type[_Wire], obj: Any, line: int | None, prefix: str = ""):
    try:
        return model.model_validate(obj)
    except ValidationError as exc:
        err = exc.errors()[0]
        path = _loc_path(err["loc"])
        if prefix:
            path = f"{prefix}.{path}" if path else prefix
        raise SchemaError(err["msg"], line, path) from None


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def iter_json_lines(source: str | Path | IO[str]) -> Iterator[tuple[int, Any]]:
    """Yield ``(line_number, decoded_object)``; blank lines are skipped."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            yield from iter_json_lines(fh)
        return
    for n, text in enumerate(source, start=1):
        if not text.strip():
            continue
        try:
            yield n, json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", n) from None


def write_lines(dest: IO[str], objs: Iterable[dict]) -> int:
    n = 0
    for obj in objs:
        dest.write(dumps(obj) + "\n")
        n += 1
    return n


def _box_in(b) -> Box:
    if isinstance(b, _BoxW):
        return Box(b.x_min, b.y_min, b.x_max, b.y_max)
    return Box.from_quad(b)


def box_to_dict(b: Box) -> dict:
    return {"x_min": b.x_min, "y_min": b.y_min, "x_max": b.x_max, "y_max": b.y_max}


# ---------------------------------------------------------------- records

@dataclass(frozen=True)
class RecordLine:
    """A parsed record plus its optional labels."""

    record: ClockRecord
    league_id: str | None = None
    clock_style: str | None = None
    line: int | None = field(default=None, compare=False)


def _record_from_wire(w: _RecordW) -> ClockRecord:
    dets = tuple(TextDetection(_box_in(d.box), d.raw_text, d.confidence) for d in w.detections)
    return ClockRecord(w.video_id, w.frame_id, w.frame_time_s, _box_in(w.clock_box), dets)


def parse_record(obj: Any, line: int | None = None, validate: bool = True, prefix: str = "") -> RecordLine:
    w = _validate(_RecordW, obj, line, prefix)
    rec = _record_from_wire(w)
    if validate:
        problems = record_violations(rec)
        if problems:
            first = problems[0]
            path = f"{prefix}.{first.path}" if prefix else first.path
            raise SchemaError(str(RecordInvalid(problems)), line, path)
    return RecordLine(rec, w.league_id, w.clock_style, line)


def record_to_dict(rec: ClockRecord, league_id: str | None = None, clock_style: str | None = None) -> dict:
    out = {
        "video_id": rec.video_id,
        "frame_id": rec.frame_id,
        "frame_time_s": rec.frame_time_s,
        "clock_box": box_to_dict(rec.clock_box),
        "detections": [{"box": box_to_dict(d.box), "raw_text": d.raw_text, "confidence": d.confidence}
                       for d in rec.detections],
    }
    if league_id is not None:
        out["league_id"] = league_id
    if clock_style is not None:
        out["clock_style"] = clock_style
    return out


def read_records(source, validate: bool = True) -> Iterator[RecordLine]:
    for n, obj in iter_json_lines(source):
        yield parse_record(obj, n, validate)


def write_records(dest: IO[str], records: Iterable[ClockRecord | RecordLine]) -> int:
    def rows():
        for r in records:
            if isinstance(r, RecordLine):
                yield record_to_dict(r.record, r.league_id, r.clock_style)
            else:
                yield record_to_dict(r)
    return write_lines(dest, rows())


# ---------------------------------------------------------------- readings

def reading_to_dict(r: GameClockReading) -> dict:
    return {
        "video_id": r.video_id,
        "source_frame_id": r.source_frame_id,
        "frame_time_s": r.frame_time_s,
        "teams": list(r.teams),
        "quarter": r.quarter,
        "time_s": r.time_s,
        "source_boxes": {SemanticClass(k).value: [box_to_dict(b) for b in v] for k, v in r.source_boxes.items()},
    }


def _reading_from_wire(w: _ReadingW, line, prefix="") -> GameClockReading:
    try:
        return GameClockReading(
            teams=w.teams, quarter=w.quarter, time_s=w.time_s, source_frame_id=w.source_frame_id,
            source_boxes={k: tuple(_box_in(b) for b in v) for k, v in w.source_boxes.items()},
            video_id=w.video_id, frame_time_s=w.frame_time_s)
    except ValueError as exc:
        raise SchemaError(str(exc), line, prefix or "reading") from None


def parse_reading(obj: Any, line: int | None = None) -> GameClockReading:
    return _reading_from_wire(_validate(_ReadingW, obj, line), line)


def read_readings(source) -> Iterator[GameClockReading]:
    for n, obj in iter_json_lines(source):
        yield parse_reading(obj, n)


def write_readings(dest: IO[str], readings: Iterable[GameClockReading]) -> int:
    return write_lines(dest, (reading_to_dict(r) for r in readings))


# ---------------------------------------------------------------- outcomes

def outcome_to_dict(o: KcOutcome) -> dict:
    return {
        "record": record_to_dict(o.record),
        "status": o.status.value,
        "reading": reading_to_dict(o.reading) if o.reading is not None else None,
        "reject_reason": o.reject_reason,
    }


def parse_outcome(obj: Any, line: int | None = None) -> KcOutcome:
    w = _validate(_OutcomeW, obj, line)
    reading = _reading_from_wire(w.reading, line, "reading") if w.reading is not None else None
    return KcOutcome(_record_from_wire(w.record), w.status, reading, w.reject_reason)


def read_outcomes(source) -> Iterator[KcOutcome]:
    for n, obj in iter_json_lines(source):
        yield parse_outcome(obj, n)


def write_outcomes(dest: IO[str], outcomes: Iterable[KcOutcome]) -> int:
    return write_lines(dest, (outcome_to_dict(o) for o in outcomes))


# ---------------------------------------------------------------- feed

def event_to_dict(e: PlayEvent) -> dict:
    return {"game_id": e.game_id, "quarter": e.quarter, "time_s": e.time_s, "teams": list(e.teams),
            "action": e.action, "players": list(e.players), "description": e.description}


def parse_event(obj: Any, line: int | None = None) -> PlayEvent:
    w = _validate(_EventW, obj, line)
    try:
        return PlayEvent(w.game_id, w.quarter, w.time_s, (canonicalize(w.teams[0]), canonicalize(w.teams[1])),
                         w.action, tuple(w.players), w.description)
    except ValueError as exc:
        raise SchemaError(str(exc), line) from None


def read_feed(source) -> list[PlayEvent]:
    """Feed events, converted to remaining game-clock time when needed.

    An optional first line ``{"meta": {"time_convention": "elapsed",
    "period_length_s": 720}}`` declares feeds that log elapsed period time.
    """
    events, meta = [], _FeedMetaW()
    for n, obj in iter_json_lines(source):
        if isinstance(obj, dict) and "meta" in obj:
            if events:
                raise SchemaError("feed metadata must precede all events", n, "meta")
            meta = _validate(_FeedHeaderW, obj, n).meta
            continue
        events.append(parse_event(obj, n))
    if meta.time_convention == "elapsed":
        if meta.period_length_s is None:
            raise SchemaError("elapsed-time feeds need period_length_s", None, "meta.period_length_s")
        events = elapsed_to_game_clock(events, meta.period_length_s)
    return events


def write_feed(dest: IO[str], events: Iterable[PlayEvent]) -> int:
    return write_lines(dest, (event_to_dict(e) for e in events))


# ---------------------------------------------------------------- segments

def segment_to_dict(s: AlignedSegment) -> dict:
    out = {"video_id": s.video_id, "frame_start": s.frame_start, "frame_end": s.frame_end,
           "status": s.status, "ambiguity": s.ambiguity}
    out.update({f"reading.{k}": v for k, v in reading_to_dict(s.reading).items()})
    event = event_to_dict(s.event) if s.event is not None else dict.fromkeys(_EventW.model_fields, None)
    out.update({f"event.{k}": v for k, v in event.items()})
    return out


def parse_segment(obj: Any, line: int | None = None) -> AlignedSegment:
    if not isinstance(obj, dict):
        raise SchemaError("segment must be a JSON object", line)
    top, reading, event = {}, {}, {}
    for k, v in obj.items():
        if k.startswith("reading."):
            reading[k[len("reading."):]] = v
        elif k.startswith("event."):
            event[k[len("event."):]] = v
        else:
            top[k] = v
    allowed = {"video_id", "frame_start", "frame_end", "status", "ambiguity"}
    extra = sorted(set(top) - allowed)
    if extra:
        raise SchemaError("unknown field", line, extra[0])
    missing = sorted(allowed - set(top))
    if missing:
        raise SchemaError("missing field", line, missing[0])
    r = _reading_from_wire(_validate(_ReadingW, reading, line, "reading"), line, "reading")
    ev = None
    if any(v is not None for v in event.values()):
        w = _validate(_EventW, event, line, "event")
        ev = PlayEvent(w.game_id, w.quarter, w.time_s, w.teams, w.action, tuple(w.players), w.description)
    seg = AlignedSegment(top["video_id"], top["frame_start"], top["frame_end"], r, ev, top["ambiguity"])
    if seg.status != top["status"]:
        raise SchemaError(f"status {top['status']!r} contradicts event/ambiguity", line, "status")
    return seg


def read_segments(source) -> Iterator[AlignedSegment]:
    for n, obj in iter_json_lines(source):
        yield parse_segment(obj, n)


def write_segments(dest: IO[str], segments: Iterable[AlignedSegment]) -> int:
    return write_lines(dest, (segment_to_dict(s) for s in segments))


# ---------------------------------------------------------------- augmentation plans

def plan_to_dict(p: AugmentPlan) -> dict:
    return {"index": p.index, "record_id": p.record_id, "scale": p.scale, "source_bucket": p.source_bucket,
            "target_bucket": p.target_bucket, "league_id": p.league_id, "infeasible": p.infeasible}


def parse_plan(obj: Any, line: int | None = None) -> AugmentPlan:
    w = _validate(_PlanW, obj, line)
    return AugmentPlan(w.index, w.scale, w.source_bucket, w.target_bucket, w.league_id, w.record_id, w.infeasible)


def read_plans(source) -> Iterator[AugmentPlan]:
    for n, obj in iter_json_lines(source):
        yield parse_plan(obj, n)


def write_plans(dest: IO[str], plans: Iterable[AugmentPlan]) -> int:
    return write_lines(dest, (plan_to_dict(p) for p in plans))


# ---------------------------------------------------------------- profile file

@dataclass(frozen=True)
class ProfileFile:
    leagues: dict[str, LeagueProfile]
    bucket_edges: dict[str, tuple[float, ...]] = field(default_factory=dict)
    augment_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    clock_styles: tuple[str, ...] = ()

    def profile(self, league_id: str | None = None) -> LeagueProfile:
        if league_id is None:
            if len(self.leagues) != 1:
                raise SchemaError(f"profile file defines {sorted(self.leagues)}; choose one with --league")
            return next(iter(self.leagues.values()))
        try:
            return self.leagues[league_id]
        except KeyError:
            raise SchemaError(f"league {league_id!r} not in profile file", None, f"leagues.{league_id}") from None


def parse_profile_file(obj: Any) -> ProfileFile:
    w = _validate(_ProfileFileW, obj, None)
    leagues = {}
    for lid, p in w.leagues.items():
        try:
            leagues[lid] = LeagueProfile(league_id=lid, team_lexicon=frozenset(p.team_lexicon),
                                         quarter_forms=tuple(p.quarter_forms),
                                         time_form_priority=tuple(p.time_form_priority),
                                         monotonic_direction=p.monotonic_direction,
                                         continuous_time=p.continuous_time, grid=p.grid,
                                         max_clock_rate=p.max_clock_rate, rate_tolerance_s=p.rate_tolerance_s,
                                         period_length_s=p.period_length_s)
        except ValueError as exc:
            raise SchemaError(str(exc), None, f"leagues.{lid}") from None
    for key, (lo, hi) in w.metadata.augment_ranges.items():
        if not 0 < lo < hi:
            raise SchemaError("need 0 < s_min < s_max", None, f"metadata.augment_ranges.{key}")
    for key, edges in w.metadata.bucket_edges.items():
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise SchemaError("edges must be strictly increasing", None, f"metadata.bucket_edges.{key}")
    return ProfileFile(leagues, {k: tuple(v) for k, v in w.metadata.bucket_edges.items()},
                       dict(w.metadata.augment_ranges), tuple(w.metadata.clock_styles))


def load_profile_file(path: str | Path) -> ProfileFile:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", exc.lineno) from None
    return parse_profile_file(obj)


def profile_to_dict(p: LeagueProfile) -> dict:
    return {
        "team_lexicon": sorted(p.team_lexicon),
        "quarter_forms": list(p.quarter_forms),
        "time_form_priority": [t.value for t in p.time_form_priority],
        "monotonic_direction": p.monotonic_direction.value,
        "continuous_time": p.continuous_time,
        "grid": p.grid,
        "max_clock_rate": p.max_clock_rate,
        "rate_tolerance_s": p.rate_tolerance_s,
        "period_length_s": p.period_length_s,
    }


def profile_file_to_dict(pf: ProfileFile) -> dict:
    return {
        "leagues": {lid: profile_to_dict(p) for lid, p in pf.leagues.items()},
        "metadata": {"bucket_edges": {k: list(v) for k, v in pf.bucket_edges.items()},
                     "augment_ranges": {k: list(v) for k, v in pf.augment_ranges.items()},
                     "clock_styles": list(pf.clock_styles)},
    }


# ---------------------------------------------------------------- evaluation corpora

class _PredW(_Wire):
    box: _BoxOrQuad
    text: str | None = None


class _GtW(_Wire):
    box: _BoxOrQuad
    text: str | None = None
    cls: SemanticClass = Field(default=SemanticClass.OTHER, alias="class")


class _EvalImageW(_Wire):
    image_id: str = ""
    preds: list[_PredW] = Field(default_factory=list)
    gts: list[_GtW] = Field(default_factory=list)


def parse_eval_image(obj: Any, line: int | None = None) -> EvalImage:
    """One evaluation image: ``{"image_id", "preds": [{box, text}], "gts": [{box, text, class}]}``."""
    w = _validate(_EvalImageW, obj, line)
    pred_t = [p.text for p in w.preds]
    gt_t = [g.text for g in w.gts]
    return EvalImage(
        pred_boxes=[_box_in(p.box) for p in w.preds],
        gt_boxes=[_box_in(g.box) for g in w.gts],
        gt_classes=[g.cls for g in w.gts],
        pred_texts=pred_t if all(t is not None for t in pred_t) else None,
        gt_texts=gt_t if all(t is not None for t in gt_t) else None,
        image_id=w.image_id,
    )


def eval_image_to_dict(img: EvalImage) -> dict:
    return {
        "image_id": img.image_id,
        "preds": [{"box": box_to_dict(b), "text": img.pred_texts[i] if img.pred_texts is not None else None}
                  for i, b in enumerate(img.pred_boxes)],
        "gts": [{"box": box_to_dict(b), "text": img.gt_texts[i] if img.gt_texts is not None else None,
                 "class": SemanticClass(img.gt_classes[i]).value}
                for i, b in enumerate(img.gt_boxes)],
    }


def read_eval_images(source) -> Iterator[EvalImage]:
    for n, obj in iter_json_lines(source):
        yield parse_eval_image(obj, n)
