"""Surface-form grammars and the semantic text classifier.

Time grammars (matched against the whole canonicalized string)::

    MIN_SEC        ^([0-9]+):([0-9]+)$            "12:34", "90:12"
    MIN_SEC_FRAC   ^([0-9]+):([0-9]+)\\.([0-9]+)$  "1:02.5"
    SEC_ONLY       ^:([0-9]+)$                    ":17"
    SEC_FRAC_ONLY  ^:([0-9]+)\\.([0-9]+)$          ":17.3"

For leagues whose clock resets each period, seconds must be below 60 when a
minutes field is present.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import NamedTuple

from .model import LeagueProfile, SemanticClass, TextDetection, TimeFormId, canonicalize

TIME_GRAMMARS: dict[TimeFormId, str] = {
    TimeFormId.MIN_SEC: r"^([0-9]+):([0-9]+)$",
    TimeFormId.MIN_SEC_FRAC: r"^([0-9]+):([0-9]+)\.([0-9]+)$",
    TimeFormId.SEC_ONLY: r"^:([0-9]+)$",
    TimeFormId.SEC_FRAC_ONLY: r"^:([0-9]+)\.([0-9]+)$",
}

_COMPILED = {k: re.compile(v) for k, v in TIME_GRAMMARS.items()}
_HAS_MINUTES = {TimeFormId.MIN_SEC, TimeFormId.MIN_SEC_FRAC}
_HAS_FRACTION = {TimeFormId.MIN_SEC_FRAC, TimeFormId.SEC_FRAC_ONLY}
_LARGEST_FRACTION = math.nextafter(1.0, 0.0)


@dataclass(frozen=True, slots=True)
class TimeForm:
    form_id: TimeFormId
    seconds: int
    minutes: int | None = None
    fraction: float | None = None

    def render(self) -> str:
        """Canonical string for this time; re-parses to an equal ``TimeForm``."""
        head = f"{self.minutes}:{self.seconds:02d}" if self.minutes is not None else f":{self.seconds:02d}"
        if self.fraction is None:
            return head
        digits = format(Decimal(repr(self.fraction)), "f").split(".", 1)
        return f"{head}.{digits[1] if len(digits) == 2 else '0'}"


def parse_time(s: str, continuous: bool = False) -> TimeForm | None:
    """Parse a canonicalized string as clock time; ``None`` when no grammar matches."""
    for form_id, pattern in _COMPILED.items():
        m = pattern.match(s)
        if m is None:
            continue
        groups = m.groups()
        minutes = int(groups[0]) if form_id in _HAS_MINUTES else None
        seconds = int(groups[1] if minutes is not None else groups[0])
        fraction = None
        if form_id in _HAS_FRACTION:
            fraction = min(float("0." + groups[-1]), _LARGEST_FRACTION)
        if minutes is not None and not continuous and seconds >= 60:
            return None
        return TimeForm(form_id, seconds, minutes, fraction)
    return None


def time_to_seconds(t: TimeForm) -> float:
    return (t.minutes or 0) * 60 + t.seconds + (t.fraction or 0.0)


def parse_quarter(s: str, profile: LeagueProfile) -> int | None:
    """1-based position of ``s`` in the profile's quarter forms, else ``None``."""
    try:
        return profile.quarter_forms.index(s) + 1
    except ValueError:
        return None


class ClassifiedText(NamedTuple):
    detection: TextDetection
    cls: SemanticClass
    text: str
    parsed_time: TimeForm | None = None
    quarter_index: int | None = None

    @property
    def time_s(self) -> float:
        if self.parsed_time is None:
            raise ValueError(f"{self.text!r} is not a time")
        return time_to_seconds(self.parsed_time)


_TEAM, _QUARTER, _TIME, _OTHER = (SemanticClass.TEAM, SemanticClass.QUARTER, SemanticClass.TIME,
                                   SemanticClass.OTHER)


def _classify_text(raw: str, profile: LeagueProfile):
    text = canonicalize(raw)
    if text in profile.team_lexicon:
        return _TEAM, text, None, None
    q = parse_quarter(text, profile)
    if q is not None:
        return _QUARTER, text, None, q
    t = parse_time(text, continuous=profile.continuous_time)
    if t is not None:
        return _TIME, text, t, None
    return _OTHER, text, None, None


_MAX_CACHED_TEXTS = 100_000
# keyed by id(); the profile is kept alive alongside its table
_TABLES: dict[int, tuple[LeagueProfile, dict]] = {}


def text_table(profile: LeagueProfile) -> "_TextTable":
    """Memoised ``raw_text -> (class, canonical text, parsed time, quarter)`` map."""
    entry = _TABLES.get(id(profile))
    if entry is None or entry[0] is not profile:
        if len(_TABLES) > 64:
            _TABLES.clear()
        entry = _TABLES[id(profile)] = (profile, _TextTable(profile))
    return entry[1]


class _TextTable(dict):
    def __init__(self, profile: LeagueProfile):
        super().__init__()
        self.profile = profile

    def __missing__(self, raw: str):
        hit = _classify_text(raw, self.profile)
        if len(self) < _MAX_CACHED_TEXTS:
            self[raw] = hit
        return hit


def classifier(profile: LeagueProfile):
    """Return a memoised ``classify`` bound to ``profile``."""
    table = text_table(profile)
    new = tuple.__new__

    def run(d: TextDetection) -> ClassifiedText:
        return new(ClassifiedText, (d, *table[d.raw_text]))

    return run


def classify(d: TextDetection, profile: LeagueProfile) -> ClassifiedText:
    """Assign one semantic class by precedence team, quarter, time, other."""
    return classifier(profile)(d)
