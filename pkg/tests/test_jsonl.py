"""Wire formats: every writer's output re-ingests losslessly."""

from __future__ import annotations

import io

import pytest

from clockdistill import jsonl
from clockdistill.align import align_segments, segment_readings
from clockdistill.augment import build_histogram, plan_augmentation
from clockdistill.errors import SchemaError
from clockdistill.evalkit import EvalImage
from clockdistill.kc_engine import distill
from clockdistill.model import Box, SemanticClass
from clockdistill.profiles import NBA, SOCCER
from clockdistill.synth import NoiseSpec, generate_game


def _round_trip(write, read, items):
    buf = io.StringIO()
    write(buf, items)
    return list(read(io.StringIO(buf.getvalue()))), buf.getvalue()


def test_records_round_trip():
    game = generate_game(NBA, 30, seed=1)
    lines = [jsonl.RecordLine(r, "nba", game.clock_style) for r in game.records]
    back, text = _round_trip(jsonl.write_records, jsonl.read_records, lines)
    assert back == lines
    assert _round_trip(jsonl.write_records, jsonl.read_records, back)[1] == text


def test_readings_outcomes_segments_round_trip():
    game = generate_game(SOCCER, 40, seed=2)
    noisy, _ = game.corrupt(NoiseSpec(char_substitution_rate=0.1, seed=2))
    outcomes = distill({game.video_id: noisy}, SOCCER).outcomes
    assert _round_trip(jsonl.write_readings, jsonl.read_readings, game.readings)[0] == game.readings
    assert _round_trip(jsonl.write_outcomes, jsonl.read_outcomes, outcomes)[0] == outcomes
    segs = align_segments(segment_readings(game.readings, continuous=True), game.feed, continuous=True)
    assert _round_trip(jsonl.write_segments, jsonl.read_segments, segs)[0] == segs
    assert _round_trip(jsonl.write_feed, jsonl.read_feed, game.feed)[0] == game.feed


def test_plans_round_trip():
    sizes = [(float(w), 10.0) for w in range(100, 200, 3)]
    plans = plan_augmentation(build_histogram(sizes, n_buckets=4), sizes, 1)
    assert _round_trip(jsonl.write_plans, jsonl.read_plans, plans)[0] == plans


def test_eval_image_round_trip():
    img = EvalImage([Box(0, 0, 1, 1)], [Box(0, 0, 1, 2)], [SemanticClass.TEAM], ["a"], ["b"], "i")
    back = jsonl.parse_eval_image(jsonl.eval_image_to_dict(img))
    assert (back.pred_boxes, back.gt_boxes, back.gt_classes, back.pred_texts, back.gt_texts) == \
        (img.pred_boxes, img.gt_boxes, img.gt_classes, img.pred_texts, img.gt_texts)


def test_profile_file_round_trip():
    pf = jsonl.ProfileFile({"nba": NBA, "soccer": SOCCER}, {"width": (0.0, 100.0, 200.0)},
                           {"nba": (0.4, 1.2)}, ("wide",))
    back = jsonl.parse_profile_file(jsonl.profile_file_to_dict(pf))
    assert back == pf


def test_quad_box_is_reduced_to_hull():
    obj = jsonl.record_to_dict(generate_game(NBA, 1).records[0])
    obj["detections"][0]["box"] = [[1, 2], [5, 1], [6, 4], [2, 5]]
    assert jsonl.parse_record(obj).record.detections[0].box == Box(1, 1, 6, 5)


def test_schema_errors_name_line_and_field():
    good = jsonl.dumps(jsonl.record_to_dict(generate_game(NBA, 1).records[0]))
    bad = good.replace('"frame_id":0', '"frame_id":"x"')
    with pytest.raises(SchemaError) as exc:
        list(jsonl.read_records(io.StringIO(good + "\n" + bad + "\n")))
    assert exc.value.line == 2 and exc.value.path == "frame_id"
    with pytest.raises(SchemaError) as exc:
        list(jsonl.read_records(io.StringIO(good.replace("}", ',"extra":1}', 1) + "\n")))
    assert exc.value.line == 1
    with pytest.raises(SchemaError) as exc:
        list(jsonl.read_records(io.StringIO("{not json\n")))
    assert "invalid JSON" in str(exc.value)
