"""Deterministic fixtures shared by the unit and acceptance tests."""

from __future__ import annotations

import numpy as np

from clockdistill.model import Box, ClockRecord, TextDetection
from clockdistill.synth import render_clock

# (noisy, kc1 rejects, kc4 rejects, clean) per league, as published
PARTITION_ROWS = {
    "nba": (80049, 6677, 7389, 65983),
    "soccer": (20437, 378, 1221, 18838),
}

_TEAM_A = Box(10, 10, 60, 40)
_TEAM_B = Box(140, 10, 190, 40)
_QUARTER = Box(260, 10, 300, 40)
_TIME = Box(320, 10, 400, 40)
_CLOCK = Box(0, 0, 600, 60)


def _record(video_id, frame, clock_s, teams, quarter_text, continuous, drop_team=False):
    dets = [TextDetection(_TEAM_A, teams[0])]
    if not drop_team:
        dets.append(TextDetection(_TEAM_B, teams[1]))
    if quarter_text is not None:
        dets.append(TextDetection(_QUARTER, quarter_text))
    dets.append(TextDetection(_TIME, render_clock(clock_s, continuous)))
    return ClockRecord(video_id, frame, float(frame), _CLOCK, tuple(dets))


def partition_fixture(profile, n_noisy, n_kc1, n_kc4, seed=0, video_len=600):
    """Videos whose exact KC1/KC4 partition is known by construction.

    Every injected fault sits between clean frames: a KC1 fault drops one
    team text, a KC4 fault shows a clock jumped 200 s against the
    direction of play.
    """
    n_clean = n_noisy - n_kc1 - n_kc4
    rng = np.random.default_rng(seed)
    kinds = np.array(["kc1"] * n_kc1 + ["kc4"] * n_kc4)
    rng.shuffle(kinds)
    slots = np.sort(rng.choice(n_clean, size=len(kinds), replace=False))
    seq = []
    j = 0
    for i in range(n_clean):
        seq.append("clean")
        if j < len(slots) and slots[j] == i:
            seq.append(str(kinds[j]))
            j += 1

    continuous = profile.continuous_time
    sign = profile.monotonic_direction.sign
    teams = sorted(profile.team_lexicon)[:2]
    quarter = None if continuous else profile.quarter_forms[0]
    # cut videos only where two clean frames follow, so no video opens on a fault
    chunks, cur = [], []
    for i, kind in enumerate(seq):
        if len(cur) >= video_len and seq[i:i + 2] == ["clean", "clean"]:
            chunks.append(cur)
            cur = []
        cur.append(kind)
    chunks.append(cur)

    videos = {}
    for v, chunk in enumerate(chunks):
        vid = f"{profile.league_id}-{v:04d}"
        recs = []
        for frame, kind in enumerate(chunk):
            clock = (video_len + 100 - frame) if sign < 0 else (300 + frame)
            if kind == "kc4":
                clock -= sign * 200
            recs.append(_record(vid, frame, clock, teams, quarter, continuous, drop_team=kind == "kc1"))
        videos[vid] = recs
    return videos
