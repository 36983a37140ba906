"""Domain types shared by every stage of the pipeline.

All types are immutable. Boxes are axis-aligned and expressed in pixels with
the origin at the top-left corner; text boxes live in the coordinate space of
the clock crop, ``[0, crop_width] x [0, crop_height]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import ProfileError, RecordInvalid


class SemanticClass(str, Enum):
    TEAM = "team"
    TIME = "time"
    QUARTER = "quarter"
    SCORE = "score"
    OTHER = "other"


SEMANTIC_CLASSES = frozenset({SemanticClass.TEAM, SemanticClass.TIME, SemanticClass.QUARTER})


class TimeFormId(str, Enum):
    MIN_SEC = "MIN_SEC"
    MIN_SEC_FRAC = "MIN_SEC_FRAC"
    SEC_ONLY = "SEC_ONLY"
    SEC_FRAC_ONLY = "SEC_FRAC_ONLY"


class Direction(str, Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.INCREASING else -1


@dataclass(frozen=True, slots=True)
class Box:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @classmethod
    def from_quad(cls, points: Iterable[Sequence[float]]) -> "Box":
        """Axis-aligned hull of an arbitrary (possibly rotated) quadrilateral."""
        pts = [(float(p[0]), float(p[1])) for p in points]
        if not pts:
            raise ValueError("empty point list")
        xs, ys = zip(*pts)
        return cls(min(xs), min(ys), max(xs), max(ys))

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return max(0.0, self.width) * max(0.0, self.height)

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def violations(self) -> list[str]:
        """Human-readable list of broken box invariants (empty when valid)."""
        out = []
        coords = self.as_tuple()
        if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in coords):
            out.append("non-finite coordinate")
            return out
        if min(coords) < 0:
            out.append("negative coordinate")
        if not self.x_min < self.x_max:
            out.append("x_min must be < x_max")
        if not self.y_min < self.y_max:
            out.append("y_min must be < y_max")
        return out

    def is_valid(self) -> bool:
        return not self.violations()


@dataclass(frozen=True, slots=True)
class TextDetection:
    box: Box
    raw_text: str
    confidence: float = 1.0


@dataclass(frozen=True, slots=True)
class ClockRecord:
    video_id: str
    frame_id: int
    frame_time_s: float
    clock_box: Box
    detections: tuple[TextDetection, ...] = ()

    @property
    def record_id(self) -> str:
        return f"{self.video_id}:{self.frame_id}"

    @property
    def crop_size(self) -> tuple[float, float]:
        return (self.clock_box.width, self.clock_box.height)


@dataclass(frozen=True)
class LeagueProfile:
    """External knowledge about one league's clock.

    ``max_clock_rate`` bounds how many clock seconds may pass per second of
    video between two frames of the same run (``None`` disables the check);
    ``rate_tolerance_s`` absorbs display quantisation.
    """

    league_id: str
    team_lexicon: frozenset[str]
    quarter_forms: tuple[str, ...]
    time_form_priority: tuple[TimeFormId, ...]
    monotonic_direction: Direction = Direction.DECREASING
    continuous_time: bool = False
    grid: int = 32
    max_clock_rate: float | None = 1.0
    rate_tolerance_s: float = 1.0
    period_length_s: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "team_lexicon", frozenset(canonicalize(t) for t in self.team_lexicon))
        object.__setattr__(self, "quarter_forms", tuple(canonicalize(q) for q in self.quarter_forms))
        object.__setattr__(self, "time_form_priority", tuple(TimeFormId(t) for t in self.time_form_priority))
        object.__setattr__(self, "monotonic_direction", Direction(self.monotonic_direction))
        problems = []
        if not self.team_lexicon:
            problems.append("team_lexicon must be non-empty")
        if not self.time_form_priority:
            problems.append("time_form_priority must be non-empty")
        if len(set(self.time_form_priority)) != len(self.time_form_priority):
            problems.append("time_form_priority must be duplicate-free")
        if self.continuous_time and self.monotonic_direction is not Direction.INCREASING:
            problems.append("continuous_time requires monotonic_direction 'increasing'")
        if not isinstance(self.grid, int) or self.grid < 1:
            problems.append("grid must be a positive integer")
        if self.max_clock_rate is not None and self.max_clock_rate <= 0:
            problems.append("max_clock_rate must be positive")
        if self.rate_tolerance_s < 0:
            problems.append("rate_tolerance_s must be >= 0")
        if problems:
            raise ProfileError(f"profile {self.league_id!r}: " + "; ".join(problems))


@dataclass(frozen=True)
class GameClockReading:
    """A validated (teams, quarter, time) triple extracted from one record.

    ``quarter`` is an index into the profile's quarter forms for leagues whose
    clock resets each period; for continuous-time leagues it holds the raw
    period string when one was visible, else ``None``.
    """

    teams: tuple[str, str]
    quarter: int | str | None
    time_s: float
    source_frame_id: int
    source_boxes: Mapping[SemanticClass, tuple[Box, ...]] = field(default_factory=dict, hash=False)
    video_id: str = ""
    frame_time_s: float | None = None

    def __post_init__(self):
        if len(self.teams) != 2 or self.teams[0] == self.teams[1]:
            raise ValueError(f"teams must be two distinct abbreviations, got {self.teams!r}")
        if not math.isfinite(self.time_s) or self.time_s < 0:
            raise ValueError(f"time_s must be finite and >= 0, got {self.time_s!r}")

    @property
    def team_set(self) -> frozenset[str]:
        return frozenset(self.teams)

    def run_key(self, continuous: bool = False) -> tuple:
        """Key whose changes split a video into monotone runs (team order ignored)."""
        a, b = self.teams
        return (a, b) if a < b else (b, a), None if continuous else self.quarter

    def same_value(self, other: "GameClockReading") -> bool:
        return (self.teams, self.quarter, self.time_s) == (other.teams, other.quarter, other.time_s)


def canonicalize(raw: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to one space."""
    return " ".join(raw.split()).lower()


@dataclass(frozen=True, slots=True)
class Violation:
    path: str
    kind: str
    message: str


def record_violations(r: ClockRecord) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(r.frame_id, int) or r.frame_id < 0:
        out.append(Violation("frame_id", "NegativeFrameId", f"got {r.frame_id!r}"))
    if not (isinstance(r.frame_time_s, (int, float)) and math.isfinite(r.frame_time_s)):
        out.append(Violation("frame_time_s", "InvalidTime", f"got {r.frame_time_s!r}"))
    for msg in r.clock_box.violations():
        out.append(Violation("clock_box", "InvalidBox", msg))
    crop_w, crop_h = r.crop_size
    for i, d in enumerate(r.detections):
        path = f"detections[{i}]"
        box_msgs = d.box.violations()
        for msg in box_msgs:
            out.append(Violation(f"{path}.box", "InvalidBox", msg))
        if not box_msgs and r.clock_box.is_valid() and (d.box.x_max > crop_w or d.box.y_max > crop_h):
            out.append(Violation(f"{path}.box", "BoxOutsideCrop",
                                 f"{d.box.as_tuple()} exceeds crop {crop_w}x{crop_h}"))
        if not isinstance(d.raw_text, str) or not d.raw_text.strip():
            out.append(Violation(f"{path}.raw_text", "EmptyText", "blank after trimming"))
        if not (isinstance(d.confidence, (int, float)) and 0.0 <= d.confidence <= 1.0):
            out.append(Violation(f"{path}.confidence", "InvalidConfidence", f"got {d.confidence!r}"))
    return out


def validate_record(r: ClockRecord) -> ClockRecord:
    """Return ``r`` unchanged if every invariant holds, else raise ``RecordInvalid``."""
    violations = record_violations(r)
    if violations:
        raise RecordInvalid(violations)
    return r
