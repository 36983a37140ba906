"""Seeded synthetic clock streams with known ground truth, plus a noise model.

A synthetic video is a highlight compilation: short clips of one game, each
starting later in game time than the last, with a fresh team pair whenever a
game runs out. Every frame's clean OCR output, its true reading and a
play-by-play feed covering every (period, second) shown are produced
together, so downstream filters can be scored exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .align import PlayEvent
from .model import Box, ClockRecord, GameClockReading, LeagueProfile, SemanticClass, TextDetection
from .surface_form import parse_time, time_to_seconds

ROLE_CLASS = {
    "team_a": SemanticClass.TEAM,
    "team_b": SemanticClass.TEAM,
    "score_a": SemanticClass.SCORE,
    "score_b": SemanticClass.SCORE,
    "quarter": SemanticClass.QUARTER,
    "game_clock": SemanticClass.TIME,
    "shot_clock": SemanticClass.TIME,
    "down": SemanticClass.OTHER,
    "distance": SemanticClass.OTHER,
}

# crop size and role boxes as fractions of the crop
_LAYOUTS = {
    "wide": ((600, 60), {
        "team_a": (0.02, 0.2, 0.12, 0.8), "score_a": (0.13, 0.2, 0.21, 0.8),
        "team_b": (0.24, 0.2, 0.34, 0.8), "score_b": (0.35, 0.2, 0.43, 0.8),
        "quarter": (0.50, 0.2, 0.58, 0.8), "game_clock": (0.60, 0.2, 0.75, 0.8),
        "shot_clock": (0.86, 0.2, 0.94, 0.8),
    }),
    "football": ((900, 80), {
        "team_a": (0.02, 0.2, 0.10, 0.8), "score_a": (0.11, 0.2, 0.17, 0.8),
        "team_b": (0.20, 0.2, 0.28, 0.8), "score_b": (0.29, 0.2, 0.35, 0.8),
        "quarter": (0.40, 0.2, 0.46, 0.8), "game_clock": (0.47, 0.2, 0.57, 0.8),
        "shot_clock": (0.60, 0.2, 0.65, 0.8),
        "down": (0.80, 0.2, 0.86, 0.8), "distance": (0.87, 0.2, 0.94, 0.8),
    }),
    "compact": ((240, 40), {
        "team_a": (0.03, 0.15, 0.20, 0.85), "score_a": (0.22, 0.15, 0.40, 0.85),
        "team_b": (0.42, 0.15, 0.59, 0.85), "game_clock": (0.70, 0.15, 0.97, 0.85),
    }),
}
_LEAGUE_LAYOUT = {"nba": "wide", "nhl": "wide", "nfl": "football", "soccer": "compact"}

_ACTIONS = ("jump shot", "layup", "dunk", "3pt shot", "rebound", "steal", "block", "foul", "turnover")

# letters <-> look-alike digits/symbols; no substitution yields another valid
# team, period or time string
OCR_CONFUSIONS = {
    "0": "o", "1": "l", "2": "z", "3": "e", "4": "a", "5": "s", "6": "b", "7": "t", "8": "b", "9": "g",
    "o": "0", "l": "1", "i": "1", "z": "2", "e": "3", "a": "4", "s": "5", "b": "8", "g": "9", "t": "7",
    ":": ";", ".": ",", "&": "8",
}


def confuse(ch: str) -> str:
    return OCR_CONFUSIONS.get(ch.lower(), "?")


def render_clock(value_s: float, continuous: bool) -> str:
    """Broadcast rendering: ``m:ss`` normally, ``:ss.t`` under a minute."""
    if continuous or value_s >= 60:
        whole = int(math.floor(value_s + 1e-9))
        return f"{whole // 60}:{whole % 60:02d}"
    tenths = int(math.floor(value_s * 10 + 1e-9))
    return f":{tenths // 10:02d}.{tenths % 10}"


def displayed_value(value_s: float, continuous: bool) -> float:
    """Clock value as a viewer reads it off :func:`render_clock`."""
    if continuous or value_s >= 60:
        return float(math.floor(value_s + 1e-9))
    return math.floor(value_s * 10 + 1e-9) / 10.0


@dataclass
class SynthGame:
    profile: LeagueProfile
    records: list[ClockRecord]
    readings: list[GameClockReading]
    feed: list[PlayEvent]
    roles: list[tuple[str, ...]]
    clock_style: str = ""

    @property
    def video_id(self) -> str:
        return self.records[0].video_id if self.records else ""

    def gt_classes(self) -> list[tuple[SemanticClass, ...]]:
        return [tuple(ROLE_CLASS[r] for r in roles) for roles in self.roles]

    def corrupt(self, spec: "NoiseSpec"):
        return corrupt(self.records, spec, roles=self.roles, continuous=self.profile.continuous_time)


def _pick_pair(rng, lexicon: Sequence[str], used: set) -> tuple[str, str]:
    for _ in range(1000):
        a, b = rng.choice(len(lexicon), size=2, replace=False)
        pair = (lexicon[a], lexicon[b])
        if frozenset(pair) not in used:
            used.add(frozenset(pair))
            return pair
    raise RuntimeError("team lexicon exhausted")


def generate_game(profile: LeagueProfile, n_frames: int, fps: float = 1.0, seed: int = 0,
                  video_id: str | None = None, clip_frames: tuple[int, int] = (6, 20),
                  stopped_clip_rate: float = 0.0, highlights: bool = False) -> SynthGame:
    """Synthesize one video for ``profile``.

    By default the video is a continuous broadcast: play proceeds in
    stretches of ``clip_frames`` frames, a ``stopped_clip_rate`` share of
    which show a stopped clock. With ``highlights`` every stretch is a clip
    cut in later, so the clock jumps between clips. Clock values follow the
    profile's direction exactly; the feed holds one event per distinct
    (teams, period, second), or per (teams, minute) for continuous-time
    leagues.
    """
    if n_frames < 1 or fps < 1:
        raise ValueError("n_frames and fps must be >= 1")
    if not 1 <= clip_frames[0] <= clip_frames[1]:
        raise ValueError(f"clip_frames must satisfy 1 <= lo <= hi, got {clip_frames}")
    rng = np.random.default_rng(seed)
    video_id = video_id if video_id is not None else f"synth-{profile.league_id}-{seed}"
    lexicon = sorted(profile.team_lexicon)
    cont = profile.continuous_time
    period = profile.period_length_s or 720.0
    n_periods = max(1, len(profile.quarter_forms))
    game_end = 95 * 60.0

    layout_name = _LEAGUE_LAYOUT.get(profile.league_id, "wide")
    (cw, ch), roles_layout = _LAYOUTS[layout_name]
    scale = float(rng.uniform(0.8, 1.2))
    cw, ch = round(cw * scale), round(ch * scale)
    role_boxes = {r: Box(round(f[0] * cw, 2), round(f[1] * ch, 2), round(f[2] * cw, 2), round(f[3] * ch, 2))
                  for r, f in roles_layout.items()}
    if not profile.quarter_forms:
        role_boxes.pop("quarter", None)
    fx, fy = float(rng.uniform(0, 1280 - cw)), float(rng.uniform(400, 720 - ch))
    clock_box = Box(round(fx, 2), round(fy, 2), round(fx + cw, 2), round(fy + ch, 2))
    role_order = [r for r in roles_layout if r in role_boxes]

    used_pairs: set = set()
    game_no = 0
    teams = _pick_pair(rng, lexicon, used_pairs)
    quarter = 1
    clock = float(rng.uniform(0, 300)) if cont else period - float(rng.uniform(0, 120))
    scores = [0, 0]

    records, readings, roles_out = [], [], []
    feed: dict[tuple, PlayEvent] = {}
    dt = 1.0 / fps
    f = 0
    first_clip = True
    while f < n_frames:
        clip_len = int(rng.integers(clip_frames[0], clip_frames[1] + 1))
        if n_frames - f - clip_len < clip_frames[0]:
            clip_len = n_frames - f  # absorb a short tail so no clip is cut below the minimum
        running = cont or rng.random() >= stopped_clip_rate
        span = (clip_len + 1) * dt
        if not first_clip and highlights:
            jump = float(rng.uniform(2.0, 90.0))
            clock = clock + jump if cont else clock - jump
        first_clip = False
        exhausted = (clock + span > game_end) if cont else (clock - span < 1.0)
        if exhausted:
            if not cont and quarter < n_periods:
                quarter += 1
                clock = period - float(rng.uniform(0, 60)) if highlights else period
            else:
                game_no += 1
                teams = _pick_pair(rng, lexicon, used_pairs)
                quarter = 1
                scores = [0, 0]
                clock = float(rng.uniform(0, 300)) if cont else period - float(rng.uniform(0, 120))
        scores[int(rng.integers(0, 2))] += int(rng.integers(0, 4))
        shot = float(rng.uniform(8, 24))
        for j in range(min(clip_len, n_frames - f)):
            value = clock + (j * dt if running else 0.0) * (1 if cont else -1)
            shown = displayed_value(value, cont)
            texts = {
                "team_a": teams[0].upper(), "team_b": teams[1].upper(),
                "score_a": str(scores[0]), "score_b": str(scores[1]),
                "game_clock": render_clock(value, cont),
                "shot_clock": f":{max(0, int(shot - j * dt)):02d}",
                "down": "2nd", "distance": "& 10",
            }
            if "quarter" in role_boxes:
                texts["quarter"] = profile.quarter_forms[quarter - 1]
            roles = tuple(r for r in role_order if not (r == "shot_clock" and shown < 60))
            dets = tuple(TextDetection(role_boxes[r], texts[r]) for r in roles)
            rec = ClockRecord(video_id, f, f * dt, clock_box, dets)
            q_value = None if cont else quarter
            boxes = {SemanticClass.TEAM: (role_boxes["team_a"], role_boxes["team_b"]),
                     SemanticClass.TIME: (role_boxes["game_clock"],)}
            if not cont:
                boxes[SemanticClass.QUARTER] = (role_boxes["quarter"],)
            readings.append(GameClockReading(teams, q_value, shown, f, boxes, video_id, f * dt))
            records.append(rec)
            roles_out.append(roles)
            key = (frozenset(teams), q_value, math.floor(shown / 60.0) if cont else math.floor(shown))
            if key not in feed:
                action = _ACTIONS[int(rng.integers(0, len(_ACTIONS)))]
                player = f"player_{int(rng.integers(1, 99))}"
                feed[key] = PlayEvent(
                    game_id=f"{video_id}-g{game_no}",
                    quarter=q_value,
                    time_s=float(key[2] * 60 if cont else key[2]),
                    teams=teams,
                    action=action,
                    players=(player,),
                    description=f"{player} {action}",
                )
            f += 1
        # a broadcast carries on one frame later; a highlight clip is cut away from here
        clock = value if highlights or not running else value + (dt if cont else -dt)
    return SynthGame(profile, records, readings, list(feed.values()), roles_out, clock_style=layout_name)


@dataclass(frozen=True)
class NoiseSpec:
    """Per-mode corruption rates.

    ``char_substitution_rate`` applies per character, ``drop_detection_rate``
    and ``time_spike_rate`` per detection / per record. ``drop_roles`` limits
    drops to the named layout roles. Spikes move the game clock by a random
    amount within ``spike_offset_s``.
    """

    char_substitution_rate: float = 0.0
    box_jitter_px: float = 0.0
    drop_detection_rate: float = 0.0
    time_spike_rate: float = 0.0
    seed: int = 0
    drop_roles: frozenset[str] | None = None
    spike_offset_s: tuple[float, float] = (10.0, 120.0)

    def __post_init__(self):
        for name in ("char_substitution_rate", "drop_detection_rate", "time_spike_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.box_jitter_px < 0:
            raise ValueError("box_jitter_px must be >= 0")
        lo, hi = self.spike_offset_s
        if not 0 < lo <= hi:
            raise ValueError("spike_offset_s must satisfy 0 < lo <= hi")


@dataclass(frozen=True)
class Corruption:
    video_id: str
    frame_id: int
    kind: str
    detection_index: int
    before: object
    after: object


def _jitter_box(rng, box: Box, px: float, crop_w: float, crop_h: float) -> Box:
    x0, y0, x1, y1 = (c + float(rng.uniform(-px, px)) for c in box.as_tuple())
    x0, x1 = sorted((min(max(x0, 0.0), crop_w), min(max(x1, 0.0), crop_w)))
    y0, y1 = sorted((min(max(y0, 0.0), crop_h), min(max(y1, 0.0), crop_h)))
    if x1 - x0 < 1.0 or y1 - y0 < 1.0:
        return box
    return Box(round(x0, 3), round(y0, 3), round(x1, 3), round(y1, 3))


def corrupt(records: Sequence[ClockRecord], spec: NoiseSpec, roles: Sequence[Sequence[str]] | None = None,
            continuous: bool = False) -> tuple[list[ClockRecord], list[Corruption]]:
    """Apply each noise mode independently and log every mutation.

    Time spikes and role-restricted drops need ``roles`` (the per-detection
    layout roles from :func:`generate_game`). Log indices refer to positions
    in the clean record's detection list.
    """
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(4)]
    rng_spike, rng_char, rng_jitter, rng_drop = streams
    if roles is None and (spec.time_spike_rate > 0 or spec.drop_roles is not None):
        raise ValueError("time spikes and role-restricted drops need detection roles")
    out, log = [], []
    for n, rec in enumerate(records):
        rec_roles = roles[n] if roles is not None else (None,) * len(rec.detections)
        dets = list(rec.detections)
        crop_w, crop_h = rec.crop_size

        if spec.time_spike_rate > 0 and "game_clock" in rec_roles and rng_spike.random() < spec.time_spike_rate:
            i = list(rec_roles).index("game_clock")
            parsed = parse_time(dets[i].raw_text.lower(), continuous)
            if parsed is not None:
                value = time_to_seconds(parsed)
                lo, hi = spec.spike_offset_s
                offset = float(rng_spike.uniform(lo, hi)) * (1 if rng_spike.random() < 0.5 else -1)
                if value + offset < 0:
                    offset = -offset
                new_text = render_clock(value + offset, continuous)
                log.append(Corruption(rec.video_id, rec.frame_id, "time_spike", i, dets[i].raw_text, new_text))
                dets[i] = replace(dets[i], raw_text=new_text)

        if spec.char_substitution_rate > 0:
            for i, d in enumerate(dets):
                chars = list(d.raw_text)
                hits = rng_char.random(len(chars)) < spec.char_substitution_rate
                if hits.any():
                    for k in np.flatnonzero(hits):
                        chars[k] = confuse(chars[k])
                    new_text = "".join(chars)
                    log.append(Corruption(rec.video_id, rec.frame_id, "char_substitution", i, d.raw_text, new_text))
                    dets[i] = replace(d, raw_text=new_text)

        if spec.box_jitter_px > 0:
            for i, d in enumerate(dets):
                new_box = _jitter_box(rng_jitter, d.box, spec.box_jitter_px, crop_w, crop_h)
                if new_box != d.box:
                    log.append(Corruption(rec.video_id, rec.frame_id, "box_jitter", i, d.box, new_box))
                    dets[i] = replace(d, box=new_box)

        keep = [True] * len(dets)
        if spec.drop_detection_rate > 0:
            for i, d in enumerate(dets):
                if spec.drop_roles is not None and rec_roles[i] not in spec.drop_roles:
                    continue
                if rng_drop.random() < spec.drop_detection_rate:
                    keep[i] = False
                    log.append(Corruption(rec.video_id, rec.frame_id, "drop", i, d.raw_text, None))

        new_dets = tuple(d for d, k in zip(dets, keep) if k)
        out.append(rec if new_dets == rec.detections else replace(rec, detections=new_dets))
    return out, log


def apply_log(records: Sequence[ClockRecord], log: Sequence[Corruption]) -> list[ClockRecord]:
    """Replay a corruption log onto clean records (inverse check for :func:`corrupt`)."""
    by_frame: dict[tuple[str, int], list[Corruption]] = {}
    for c in log:
        by_frame.setdefault((c.video_id, c.frame_id), []).append(c)
    out = []
    for rec in records:
        dets = list(rec.detections)
        dropped = set()
        for c in by_frame.get((rec.video_id, rec.frame_id), ()):
            if c.kind in ("time_spike", "char_substitution"):
                dets[c.detection_index] = replace(dets[c.detection_index], raw_text=c.after)
            elif c.kind == "box_jitter":
                dets[c.detection_index] = replace(dets[c.detection_index], box=c.after)
            elif c.kind == "drop":
                dropped.add(c.detection_index)
        new = tuple(d for i, d in enumerate(dets) if i not in dropped)
        out.append(rec if new == rec.detections else replace(rec, detections=new))
    return out
