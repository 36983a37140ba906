"""Bind clean clock readings to play-by-play events.

Run: python3 demos/align_with_feed.py
"""

from clockdistill.align import align_segments, alignment_stats, segment_readings
from clockdistill.kc_engine import distill
from clockdistill.profiles import SOCCER
from clockdistill.synth import NoiseSpec, generate_game

game = generate_game(SOCCER, 400, seed=5)
noisy, _ = game.corrupt(NoiseSpec(char_substitution_rate=0.03, time_spike_rate=0.03, seed=5))
clean = [o.reading for o in distill({game.video_id: noisy}, SOCCER).clean]

# soccer clocks never reset, so runs and feed events are keyed by (teams, minute)
runs = segment_readings(clean, continuous=True)
segments = align_segments(runs, game.feed, continuous=True)
print(alignment_stats(segments).to_dict())
for seg in segments[:4]:
    print(f"frames {seg.frame_start}-{seg.frame_end}: {seg.reading.teams} "
          f"{int(seg.reading.time_s) // 60}' -> {seg.event.description if seg.event else seg.status}")

# drop one event from the feed: exactly the run it served goes unmatched
partial = align_segments(runs, game.feed[1:], continuous=True)
print("unmatched after removing one event:", alignment_stats(partial).n_unmatched)
