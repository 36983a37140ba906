"""Score a noisy text detector on synthetic clocks.

Run: python3 demos/evaluate_text_detector.py
"""

import numpy as np

from clockdistill.evalkit import EvalImage, metrics_csv, metrics_table
from clockdistill.model import Box
from clockdistill.profiles import NHL
from clockdistill.synth import confuse, generate_game

rng = np.random.default_rng(3)
game = generate_game(NHL, 80, seed=3)
images = []
for rec, classes in zip(game.records, game.gt_classes()):
    preds, texts = [], []
    for d in rec.detections:
        if rng.random() < 0.05:
            continue  # missed box
        j = rng.normal(0, 2.0, 4)  # localisation error in pixels
        b = d.box
        preds.append(Box(max(0, b.x_min + j[0]), max(0, b.y_min + j[1]), b.x_max + j[2], b.y_max + j[3]))
        t = d.raw_text
        texts.append(t if rng.random() > 0.1 else confuse(t[0]) + t[1:])
    images.append(EvalImage(preds, [d.box for d in rec.detections], classes, texts,
                            [d.raw_text for d in rec.detections], rec.record_id))

# precision falls as the IoU bar rises; end-to-end also needs the exact string
print(metrics_csv(metrics_table(images)))
