"""Built-in league profiles.

Team lexicons use the short abbreviations broadcasters put on clocks. They
are defaults; a profile file can replace any of them.
"""

from __future__ import annotations

from .model import Direction, LeagueProfile, TimeFormId

NBA_TEAMS = (
    "atl bos bkn cha chi cle dal den det gs hou ind lac lal mem mia "
    "mil min no ny okc orl phi phx por sac sa tor uta was"
).split()

NFL_TEAMS = (
    "ari atl bal buf car chi cin cle dal den det gb hou ind jax kc "
    "lv lac lar mia min ne no nyg nyj phi pit sf sea tb ten wsh"
).split()

NHL_TEAMS = (
    "ana bos buf cgy car chi col cbj dal det edm fla lak min mtl nsh "
    "njd nyi nyr ott phi pit sjs sea stl tbl tor uta van vgk wsh wpg"
).split()

SOCCER_TEAMS = (
    "ars avl bou bre bha che cry eve ful ips lei liv mci mun new nfo "
    "sou tot whu wol bar rma atm juv int mil psg bay bvb"
).split()

QUARTERS = ("1st", "2nd", "3rd", "4th")

NBA = LeagueProfile(
    league_id="nba",
    team_lexicon=frozenset(NBA_TEAMS),
    quarter_forms=QUARTERS,
    # seconds-only ":17" is the shot clock, never the game clock
    time_form_priority=(TimeFormId.MIN_SEC, TimeFormId.SEC_FRAC_ONLY, TimeFormId.MIN_SEC_FRAC),
    monotonic_direction=Direction.DECREASING,
    period_length_s=720.0,
)

NFL = LeagueProfile(
    league_id="nfl",
    team_lexicon=frozenset(NFL_TEAMS),
    quarter_forms=QUARTERS,
    # seconds-only ":40" is the play clock
    time_form_priority=(TimeFormId.MIN_SEC, TimeFormId.SEC_FRAC_ONLY),
    monotonic_direction=Direction.DECREASING,
    period_length_s=900.0,
)

NHL = LeagueProfile(
    league_id="nhl",
    team_lexicon=frozenset(NHL_TEAMS),
    quarter_forms=QUARTERS[:3],
    time_form_priority=(TimeFormId.MIN_SEC, TimeFormId.SEC_FRAC_ONLY, TimeFormId.MIN_SEC_FRAC),
    monotonic_direction=Direction.DECREASING,
    period_length_s=1200.0,
)

SOCCER = LeagueProfile(
    league_id="soccer",
    team_lexicon=frozenset(SOCCER_TEAMS),
    quarter_forms=(),
    time_form_priority=(TimeFormId.MIN_SEC,),
    monotonic_direction=Direction.INCREASING,
    continuous_time=True,
)

PRESETS: dict[str, LeagueProfile] = {p.league_id: p for p in (NBA, NFL, NHL, SOCCER)}


def get_profile(league_id: str) -> LeagueProfile:
    try:
        return PRESETS[league_id.lower()]
    except KeyError:
        raise KeyError(f"unknown league {league_id!r}; presets: {sorted(PRESETS)}") from None
