"""Time/quarter grammars and the semantic classifier."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from clockdistill.model import Box, SemanticClass, TextDetection, TimeFormId
from clockdistill.profiles import NBA, SOCCER
from clockdistill.surface_form import TimeForm, classify, parse_quarter, parse_time, time_to_seconds


def _det(text):
    return TextDetection(Box(0, 0, 10, 10), text)


def test_parse_time_examples():
    assert parse_time("12:34") == TimeForm(TimeFormId.MIN_SEC, 34, 12)
    assert parse_time(":17.3") == TimeForm(TimeFormId.SEC_FRAC_ONLY, 17, None, 0.3)
    assert parse_time("4:38") == TimeForm(TimeFormId.MIN_SEC, 38, 4)
    assert parse_time(":17") == TimeForm(TimeFormId.SEC_ONLY, 17)
    assert parse_time("& 10") is None


def test_seconds_bound_only_for_resetting_clocks():
    assert parse_time("90:72") is None
    assert parse_time("90:72", continuous=True) == TimeForm(TimeFormId.MIN_SEC, 72, 90)


@pytest.mark.parametrize("text, seconds", [("12:34", 754.0), (":17.3", 17.3), ("23:21", 1401.0)])
def test_time_to_seconds_examples(text, seconds):
    assert time_to_seconds(parse_time(text, continuous=True)) == pytest.approx(seconds)


def test_parse_quarter_examples():
    assert parse_quarter("2nd", NBA) == 2
    assert parse_quarter("1st", NBA) == 1
    assert parse_quarter("5th", NBA) is None


time_forms = st.one_of(
    st.builds(TimeForm, st.just(TimeFormId.MIN_SEC), st.integers(0, 59), st.integers(0, 999)),
    st.builds(TimeForm, st.just(TimeFormId.MIN_SEC_FRAC), st.integers(0, 59), st.integers(0, 999),
              st.integers(0, 999).map(lambda k: k / 1000)),
    st.builds(TimeForm, st.just(TimeFormId.SEC_ONLY), st.integers(0, 999)),
    st.builds(TimeForm, st.just(TimeFormId.SEC_FRAC_ONLY), st.integers(0, 999), st.none(),
              st.integers(0, 99).map(lambda k: k / 100)),
)


@given(time_forms)
def test_render_round_trip(t):
    assert parse_time(t.render()) == t


@given(st.integers(0, 99), st.integers(0, 58), st.integers(0, 9))
def test_time_to_seconds_is_monotone_per_field(m, s, f):
    base = time_to_seconds(TimeForm(TimeFormId.MIN_SEC_FRAC, s, m, f / 10))
    assert time_to_seconds(TimeForm(TimeFormId.MIN_SEC_FRAC, s, m + 1, f / 10)) > base
    assert time_to_seconds(TimeForm(TimeFormId.MIN_SEC_FRAC, s + 1, m, f / 10)) > base
    if f < 9:
        assert time_to_seconds(TimeForm(TimeFormId.MIN_SEC_FRAC, s, m, (f + 1) / 10)) > base


def test_classify_examples():
    assert classify(_det("PHX"), NBA).cls is SemanticClass.TEAM
    c = classify(_det("10:32"), NBA)
    assert c.cls is SemanticClass.TIME and c.parsed_time.form_id is TimeFormId.MIN_SEC
    assert classify(_det("xyz9"), NBA).cls is SemanticClass.OTHER
    assert classify(_det("2nd"), NBA).quarter_index == 2
    assert classify(_det("& 10"), NBA).cls is SemanticClass.OTHER


@given(st.text(max_size=8))
def test_classify_is_total_and_deterministic(s):
    a, b = classify(_det(s), NBA), classify(_det(s), NBA)
    assert a == b
    assert a.cls in {SemanticClass.TEAM, SemanticClass.QUARTER, SemanticClass.TIME, SemanticClass.OTHER}


@given(st.sampled_from(sorted(NBA.team_lexicon | SOCCER.team_lexicon)))
def test_lexicon_strings_are_always_teams(team):
    profile = NBA if team in NBA.team_lexicon else SOCCER
    assert classify(_det(team.upper()), profile).cls is SemanticClass.TEAM
