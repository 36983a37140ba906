"""Clean a noisy synthetic NBA broadcast and see where each rejected frame went.

Run: python3 demos/distill_noisy_broadcast.py
"""

from collections import Counter

from clockdistill.kc_engine import Kc4Mode, KcStatus, distill
from clockdistill.profiles import NBA
from clockdistill.synth import NoiseSpec, generate_game

game = generate_game(NBA, 600, seed=21, stopped_clip_rate=0.1)
noisy, log = game.corrupt(NoiseSpec(char_substitution_rate=0.04, drop_detection_rate=0.03,
                                    time_spike_rate=0.04, seed=21))
print(f"{len(noisy)} frames, {len(log)} logged corruptions")
print("corruption kinds:", dict(Counter(c.kind for c in log)))

truth = {r.source_frame_id: r for r in game.readings}
for mode in Kc4Mode:
    result = distill({game.video_id: noisy}, NBA, mode)
    rep = result.report
    wrong = sum(1 for o in result.outcomes if o.status is KcStatus.CLEAN_LABEL
                and o.reading.time_s != truth[o.record.frame_id].time_s)
    print(f"\n[{mode.value}] clean {rep.clean} (corrected {rep.corrected}), "
          f"kc1 {rep.rejected_kc1}, kc4 {rep.rejected_kc4}; wrong clean labels: {wrong}")
    reasons = Counter(o.reject_reason.split(" (")[0] for o in result.outcomes if o.reject_reason)
    for reason, n in reasons.most_common(6):
        print(f"  {n:4d}  {reason}")

# KC1 rejects are hard negatives: crops that look like clocks but are not readable ones
print("\nfirst hard negatives:", rep.hard_negative_ids[:3])
