"""Align clean clock readings to a play-by-play feed.

Frames are grouped into runs that share (teams, period, whole second); each
run is looked up in the feed by the same key with the team pair treated as
unordered. Continuous-time leagues key on (teams, minute) instead, because
their feeds carry no periods.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import GameClockReading


@dataclass(frozen=True)
class PlayEvent:
    game_id: str
    quarter: int | str | None
    time_s: float
    teams: tuple[str, str]
    action: str = ""
    players: tuple[str, ...] = ()
    description: str = ""

    def __post_init__(self):
        if len(self.teams) != 2 or self.teams[0] == self.teams[1]:
            raise ValueError(f"teams must be two distinct abbreviations, got {self.teams!r}")
        if not (math.isfinite(self.time_s) and self.time_s >= 0):
            raise ValueError(f"time_s must be finite and >= 0, got {self.time_s!r}")


def alignment_key(teams: Iterable[str], quarter, time_s: float, continuous: bool = False) -> tuple:
    if continuous:
        return (frozenset(teams), None, math.floor(time_s / 60.0))
    return (frozenset(teams), quarter, math.floor(time_s))


def reading_key(r: GameClockReading, continuous: bool = False) -> tuple:
    return alignment_key(r.teams, r.quarter, r.time_s, continuous)


@dataclass(frozen=True)
class FrameRun:
    video_id: str
    readings: tuple[GameClockReading, ...]
    key: tuple

    @property
    def frame_start(self) -> int:
        return self.readings[0].source_frame_id

    @property
    def frame_end(self) -> int:
        return self.readings[-1].source_frame_id

    def __len__(self) -> int:
        return len(self.readings)


def segment_readings(readings: Sequence[GameClockReading], max_gap: int = 3,
                     continuous: bool = False) -> list[FrameRun]:
    """Maximal runs of frames with an identical alignment key.

    A run also ends when consecutive frame ids differ by more than ``max_gap``.
    """
    runs: list[list[GameClockReading]] = []
    keys: list[tuple] = []
    for r in readings:
        k = reading_key(r, continuous)
        if runs and keys[-1] == k and r.source_frame_id - runs[-1][-1].source_frame_id <= max_gap \
                and r.video_id == runs[-1][-1].video_id:
            runs[-1].append(r)
        else:
            runs.append([r])
            keys.append(k)
    return [FrameRun(run[0].video_id, tuple(run), k) for run, k in zip(runs, keys)]


class FeedIndex:
    """Immutable lookup from alignment key to feed events."""

    def __init__(self, events: Iterable[PlayEvent], continuous: bool = False):
        self.continuous = continuous
        index: dict[tuple, list[PlayEvent]] = defaultdict(list)
        for e in events:
            index[alignment_key(e.teams, e.quarter, e.time_s, continuous)].append(e)
        self._index = {k: tuple(v) for k, v in index.items()}

    def lookup(self, key: tuple) -> tuple[PlayEvent, ...]:
        return self._index.get(key, ())

    def __len__(self) -> int:
        return sum(len(v) for v in self._index.values())


@dataclass(frozen=True)
class AlignedSegment:
    video_id: str
    frame_start: int
    frame_end: int
    reading: GameClockReading
    event: PlayEvent | None = None
    ambiguity: int = 0

    @property
    def status(self) -> str:
        if self.event is not None:
            return "aligned"
        return "ambiguous" if self.ambiguity > 1 else "unmatched"

    @property
    def n_frames(self) -> int:
        return self.frame_end - self.frame_start + 1


def align_segments(runs: Iterable[FrameRun], feed: Iterable[PlayEvent] | FeedIndex,
                   continuous: bool = False) -> list[AlignedSegment]:
    """Attach the unique feed event matching each run's key.

    ``ambiguity`` holds the number of candidate events; with more than one
    candidate no event is attached.
    """
    index = feed if isinstance(feed, FeedIndex) else FeedIndex(feed, continuous)
    out = []
    for run in runs:
        cands = index.lookup(run.key)
        out.append(AlignedSegment(
            video_id=run.video_id,
            frame_start=run.frame_start,
            frame_end=run.frame_end,
            reading=run.readings[0],
            event=cands[0] if len(cands) == 1 else None,
            ambiguity=len(cands),
        ))
    return out


@dataclass(frozen=True)
class AlignmentStats:
    n_segments: int
    n_aligned: int
    n_unmatched: int
    n_ambiguous: int
    aligned_pct: float
    unmatched_pct: float
    ambiguous_pct: float
    mean_run_length: float
    empty: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def alignment_stats(segments: Sequence[AlignedSegment]) -> AlignmentStats:
    n = len(segments)
    if n == 0:
        return AlignmentStats(0, 0, 0, 0, 0.0, 0.0, 0.0, 0.0, True)
    counts = {"aligned": 0, "unmatched": 0, "ambiguous": 0}
    for s in segments:
        counts[s.status] += 1
    return AlignmentStats(
        n_segments=n,
        n_aligned=counts["aligned"],
        n_unmatched=counts["unmatched"],
        n_ambiguous=counts["ambiguous"],
        aligned_pct=100.0 * counts["aligned"] / n,
        unmatched_pct=100.0 * counts["unmatched"] / n,
        ambiguous_pct=100.0 * counts["ambiguous"] / n,
        mean_run_length=sum(s.n_frames for s in segments) / n,
        empty=False,
    )


def elapsed_to_game_clock(events: Iterable[PlayEvent], period_length_s: float) -> list[PlayEvent]:
    """Convert feeds that log elapsed period time into remaining game-clock time."""
    out = []
    for e in events:
        remaining = max(0.0, period_length_s - e.time_s)
        out.append(PlayEvent(e.game_id, e.quarter, remaining, e.teams, e.action, e.players, e.description))
    return out
