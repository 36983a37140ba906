"""Domain types: boxes, records, profiles and canonicalization."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from clockdistill.errors import ProfileError, RecordInvalid
from clockdistill.model import (
    Box, ClockRecord, Direction, GameClockReading, LeagueProfile, TextDetection, TimeFormId,
    canonicalize, record_violations, validate_record,
)


def _record(box=Box(0, 0, 10, 10), text="phx", frame_id=0):
    return ClockRecord("v", frame_id, 0.0, Box(0, 0, 100, 50), (TextDetection(box, text),))


@pytest.mark.parametrize("raw, expected", [("PHX", "phx"), ("  2nd ", "2nd"), ("", ""), ("& \t 10", "& 10")])
def test_canonicalize_examples(raw, expected):
    assert canonicalize(raw) == expected


@given(st.text())
def test_canonicalize_is_idempotent(s):
    once = canonicalize(s)
    assert canonicalize(once) == once


def test_valid_record_is_returned_unchanged():
    r = _record()
    assert validate_record(r) is r


def test_zero_width_box_is_invalid():
    with pytest.raises(RecordInvalid) as exc:
        validate_record(_record(box=Box(10, 0, 10, 10)))
    assert exc.value.kinds == {"InvalidBox"}
    assert exc.value.violations[0].path == "detections[0].box"


def test_blank_text_is_rejected():
    with pytest.raises(RecordInvalid) as exc:
        validate_record(_record(text="   "))
    assert exc.value.kinds == {"EmptyText"}


def test_every_violation_is_reported():
    with pytest.raises(RecordInvalid) as exc:
        validate_record(_record(box=Box(10, 0, 10, 10), text="", frame_id=-1))
    assert exc.value.kinds == {"InvalidBox", "EmptyText", "NegativeFrameId"}


def test_box_outside_crop_is_rejected():
    assert {v.kind for v in record_violations(_record(box=Box(90, 0, 120, 10)))} == {"BoxOutsideCrop"}


coord = st.floats(min_value=-5, max_value=50, allow_nan=False)


@given(coord, coord, coord, coord)
def test_validation_matches_box_predicates(x0, y0, x1, y1):
    r = _record(box=Box(x0, y0, x1, y1))
    ok = min(x0, y0) >= 0 and x0 < x1 and y0 < y1 and x1 <= 100 and y1 <= 50
    assert (not record_violations(r)) == ok


def test_box_from_quad_is_axis_aligned_hull():
    assert Box.from_quad([(1, 2), (5, 1), (6, 4), (2, 5)]) == Box(1, 1, 6, 5)


def test_box_nan_is_invalid():
    assert Box(math.nan, 0, 1, 1).violations() == ["non-finite coordinate"]


def test_profile_invariants():
    base = dict(league_id="x", team_lexicon=frozenset({"AAA"}), quarter_forms=("1st",),
                time_form_priority=(TimeFormId.MIN_SEC,))
    p = LeagueProfile(**base)
    assert p.team_lexicon == {"aaa"}
    with pytest.raises(ProfileError):
        LeagueProfile(**{**base, "team_lexicon": frozenset()})
    with pytest.raises(ProfileError):
        LeagueProfile(**{**base, "time_form_priority": ()})
    with pytest.raises(ProfileError):
        LeagueProfile(**{**base, "time_form_priority": (TimeFormId.MIN_SEC, TimeFormId.MIN_SEC)})
    with pytest.raises(ProfileError):
        LeagueProfile(**{**base, "continuous_time": True, "monotonic_direction": Direction.DECREASING})


def test_reading_invariants_and_run_key():
    r = GameClockReading(("phx", "gs"), 2, 17.3, 0)
    assert r.run_key() == (("gs", "phx"), 2)
    assert r.run_key(continuous=True) == (("gs", "phx"), None)
    with pytest.raises(ValueError):
        GameClockReading(("gs", "gs"), 2, 17.3, 0)
    with pytest.raises(ValueError):
        GameClockReading(("phx", "gs"), 2, math.inf, 0)
