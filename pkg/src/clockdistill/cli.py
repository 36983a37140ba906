"""Command-line entry point: ``clockdistill <command> [options]``.

Commands read and write JSON Lines ("-" means stdin/stdout) and share the
flags ``--seed``, ``--profile``, ``--league``, ``--format``. Exit codes: 0 ok,
2 schema or validation failure, 3 I/O failure, 4 infeasible configuration.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import functools
import itertools
import json
import os
import sys
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import jsonl
from .align import align_segments, alignment_stats, segment_readings
from .augment import Axis, build_histogram, plan_augmentation, stratified_sample
from .errors import ClockDistillError, EmptyInput, InfeasibleConfiguration, SchemaError
from .evalkit import DEFAULT_THRESHOLDS, EvalConfig, metrics_csv, metrics_table
from .geometry import Strategy, compare_strategies, resize_to_grid
from .kc_engine import DistillReport, Kc4Mode, distill_video
from .model import LeagueProfile
from .profiles import PRESETS
from .synth import NoiseSpec, generate_game

EXIT_OK, EXIT_SCHEMA, EXIT_IO, EXIT_INFEASIBLE = 0, 2, 3, 4


# ---------------------------------------------------------------- plumbing

@contextlib.contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as fh:
            yield fh


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _check_format(args, allowed: Sequence[str]) -> str:
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise SchemaError(f"--format {fmt} not supported here; choose from {list(allowed)}", None, "--format")
    return fmt


@functools.lru_cache(maxsize=4)
def _load_profile_file(path: str) -> jsonl.ProfileFile:
    return jsonl.load_profile_file(path)


def _profile_file(args):
    return _load_profile_file(args.profile) if args.profile else None


def _resolve_profile(args, hint: str | None = None) -> LeagueProfile:
    """``--league`` wins, then the records' own league, then a single-league profile file."""
    pf = _profile_file(args)
    league = args.league or hint
    if pf is not None:
        return pf.profile(league)
    if league is None:
        raise SchemaError("no league given; pass --league or --profile", None, "--league")
    if league.lower() not in PRESETS:
        raise SchemaError(f"unknown league {league!r}; presets: {sorted(PRESETS)}", None, "--league")
    return PRESETS[league.lower()]


def ordered_map(fn: Callable, items: Iterable, workers: int = 1, max_pending: int | None = None) -> Iterator:
    """``map`` over ``items`` with a bounded process pool, yielding in input order."""
    if workers <= 1:
        yield from map(fn, items)
        return
    max_pending = max_pending or 2 * workers
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= max_pending:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def iter_videos(lines: Iterable[jsonl.RecordLine]) -> Iterator[list[jsonl.RecordLine]]:
    """Group contiguous record lines by video, enforcing strictly increasing frame ids."""
    seen: set[str] = set()
    for vid, group in itertools.groupby(lines, key=lambda r: r.record.video_id):
        if vid in seen:
            raise SchemaError(f"records of video {vid!r} are not contiguous", None, "video_id")
        seen.add(vid)
        batch = []
        for rl in group:
            if batch and rl.record.frame_id <= batch[-1].record.frame_id:
                raise SchemaError("frame_id must strictly increase within a video", rl.line, "frame_id")
            batch.append(rl)
        yield batch


def _distill_job(job):
    records, profile, mode = job
    return distill_video(records, profile, mode)


# ---------------------------------------------------------------- commands

def cmd_clean(args) -> int:
    fmt = _check_format(args, ("jsonl", "json"))
    mode = Kc4Mode(args.mode)
    report = DistillReport()
    hard_negatives = []

    with _open_in(args.input) as src, _open_out(args.out) as out:
        def jobs():
            for batch in iter_videos(jsonl.read_records(src)):
                profile = _resolve_profile(args, batch[0].league_id)
                yield [rl.record for rl in batch], profile, mode

        outcomes_all = [] if fmt == "json" else None
        for outcomes, n_short in ordered_map(_distill_job, jobs(), args.workers):
            part = DistillReport.from_outcomes(outcomes, n_short)
            report = report.merge(part)
            hard_negatives.extend(part.hard_negative_ids)
            if outcomes_all is not None:
                outcomes_all.extend(jsonl.outcome_to_dict(o) for o in outcomes)
            else:
                jsonl.write_outcomes(out, outcomes)
        if outcomes_all is not None:
            json.dump(outcomes_all, out, separators=(",", ":"))
            out.write("\n")

    if args.hard_negatives:
        with _open_out(args.hard_negatives) as fh:
            fh.writelines(f"{rid}\n" for rid in hard_negatives)
    with (_open_out(args.report) if args.report else contextlib.nullcontext(sys.stderr)) as fh:
        fh.write(report.to_json() + "\n")
    return EXIT_OK


def _read_readings(path: str):
    """Readings JSONL, or clean readings out of a ``clean`` outcomes file."""
    with _open_in(path) as src:
        for n, obj in jsonl.iter_json_lines(src):
            if isinstance(obj, dict) and "record" in obj:
                o = jsonl.parse_outcome(obj, n)
                if o.status.is_clean and o.reading is not None:
                    yield o.reading
            else:
                yield jsonl.parse_reading(obj, n)


def cmd_align(args) -> int:
    _check_format(args, ("jsonl",))
    continuous = _resolve_profile(args).continuous_time if (args.league or args.profile) else False
    with _open_in(args.feed) as fh:
        feed = jsonl.read_feed(fh)
    readings = list(_read_readings(args.readings))
    readings.sort(key=lambda r: (r.video_id, r.source_frame_id))
    segments = align_segments(segment_readings(readings, args.max_gap, continuous), feed, continuous)
    with _open_out(args.out) as out:
        jsonl.write_segments(out, segments)
    sys.stdout.write(json.dumps(alignment_stats(segments).to_dict()) + "\n")
    return EXIT_OK


_STAT_FIELDS = ("image_width", "image_height", "image_aspect", "text_width", "text_height", "text_aspect")


def cmd_stats(args) -> int:
    _check_format(args, ("csv",))
    values: dict[str, dict[str, list[float]]] = {}
    with _open_in(args.input) as src:
        for rl in jsonl.read_records(src):
            league = rl.league_id or args.league or "unknown"
            bucket = values.setdefault(league, {k: [] for k in _STAT_FIELDS})
            w, h = rl.record.crop_size
            bucket["image_width"].append(w)
            bucket["image_height"].append(h)
            bucket["image_aspect"].append(w / h)
            for d in rl.record.detections:
                bucket["text_width"].append(d.box.width)
                bucket["text_height"].append(d.box.height)
                bucket["text_aspect"].append(d.box.width / d.box.height)
    if not values:
        raise EmptyInput("no records to summarise")
    with _open_out(args.out) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["league", "quantity", "n", "q1", "median", "q3"])
        for league in sorted(values):
            for field in _STAT_FIELDS:
                xs = values[league][field]
                if not xs:
                    continue
                q1, med, q3 = np.percentile(xs, [25, 50, 75])
                w.writerow([league, field, len(xs), f"{q1:.6g}", f"{med:.6g}", f"{q3:.6g}"])
    return EXIT_OK


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise SchemaError(f"expected comma-separated numbers, got {text!r}", None, name) from None


def cmd_plan_augment(args) -> int:
    _check_format(args, ("jsonl",))
    axis = Axis(args.axis)
    with _open_in(args.input) as src:
        lines = list(jsonl.read_records(src))
    if not lines:
        raise EmptyInput("no records to plan")
    if args.per_style:
        lines = stratified_sample(lines, [rl.clock_style or "" for rl in lines], args.per_style, args.seed)
    league = args.league or lines[0].league_id or ""
    pf = _profile_file(args)

    edges = _parse_floats(args.edges, "--edges") if args.edges else None
    if edges is None and pf is not None:
        edges = pf.bucket_edges.get(axis.value) or pf.bucket_edges.get(league)
    if args.range:
        scale_range = tuple(_parse_floats(args.range, "--range"))
        if len(scale_range) != 2:
            raise SchemaError("--range takes s_min,s_max", None, "--range")
    elif pf is not None and league in pf.augment_ranges:
        scale_range = pf.augment_ranges[league]
    else:
        scale_range = (0.4, 1.2)

    if axis in (Axis.WIDTH, Axis.HEIGHT):
        sizes = [rl.record.crop_size for rl in lines]
        ids = [rl.record.record_id for rl in lines]
    else:
        sizes = [(d.box.width, d.box.height) for rl in lines for d in rl.record.detections]
        ids = [f"{rl.record.record_id}:{i}" for rl in lines for i in range(len(rl.record.detections))]
    hist = build_histogram(sizes, edges, axis, args.buckets)
    plans = plan_augmentation(hist, sizes, args.seed, scale_range, league, ids)
    with _open_out(args.out) as out:
        jsonl.write_plans(out, plans)
    return EXIT_OK


def _parse_size(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        return float(w), float(h)
    except ValueError:
        raise SchemaError(f"expected WxH, got {text!r}", None, "size") from None


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def cmd_resize(args) -> int:
    fmt = _check_format(args, ("text", "jsonl", "csv"))
    sizes = [_parse_size(s) for s in args.sizes]
    if args.input:
        with _open_in(args.input) as src:
            sizes.extend(rl.record.crop_size for rl in jsonl.read_records(src))
    if not sizes:
        raise EmptyInput("no sizes given")
    grid = args.grid or (_resolve_profile(args).grid if (args.league or args.profile) else 32)
    with _open_out(args.out) as out:
        if fmt == "csv":
            out.write(compare_strategies(sizes, grid).to_csv())
            return EXIT_OK
        for w, h in sizes:
            d = resize_to_grid(w, h, grid, Strategy(args.strategy))
            if fmt == "text":
                out.write(f"{d.resized[0]}x{d.resized[1]}\n")
            else:
                out.write(jsonl.dumps({"width": w, "height": h, "resized_width": d.resized[0],
                                       "resized_height": d.resized[1],
                                       "distortion_width": d.per_dim_distortion[0],
                                       "distortion_height": d.per_dim_distortion[1],
                                       "aspect_distortion": d.aspect_distortion}) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    _check_format(args, ("csv",))
    thresholds = _parse_floats(args.thresholds, "--thresholds") if args.thresholds else DEFAULT_THRESHOLDS
    try:
        config = EvalConfig(tuple(thresholds), macro=args.macro)
    except ValueError as exc:
        raise SchemaError(str(exc), None, "--thresholds") from None
    with _open_in(args.input) as src:
        images = list(jsonl.read_eval_images(src))
    with _open_out(args.out) as out:
        out.write(metrics_csv(metrics_table(images, config)))
    return EXIT_OK


def cmd_synth(args) -> int:
    _check_format(args, ("jsonl",))
    profile = _resolve_profile(args)
    try:
        spec = NoiseSpec(args.char_sub, args.jitter, args.drop, args.spike, seed=args.seed)
    except ValueError as exc:
        raise SchemaError(str(exc), None, "noise") from None
    seeds = np.random.SeedSequence(args.seed).generate_state(args.videos)
    with contextlib.ExitStack() as stack:
        out = stack.enter_context(_open_out(args.out))
        feed_fh = stack.enter_context(_open_out(args.feed_out)) if args.feed_out else None
        truth_fh = stack.enter_context(_open_out(args.truth_out)) if args.truth_out else None
        log_fh = stack.enter_context(_open_out(args.log_out)) if args.log_out else None
        for v, s in enumerate(seeds):
            game = generate_game(profile, args.frames, args.fps, int(s), f"synth-{profile.league_id}-{args.seed}-{v}",
                                 highlights=args.highlights)
            records, log = game.corrupt(replace(spec, seed=int(s)))
            jsonl.write_records(out, (jsonl.RecordLine(r, profile.league_id, game.clock_style) for r in records))
            if feed_fh is not None:
                jsonl.write_feed(feed_fh, game.feed)
            if truth_fh is not None:
                jsonl.write_readings(truth_fh, game.readings)
            if log_fh is not None:
                jsonl.write_lines(log_fh, ({"video_id": c.video_id, "frame_id": c.frame_id, "kind": c.kind,
                                            "detection_index": c.detection_index,
                                            "before": _log_value(c.before), "after": _log_value(c.after)}
                                           for c in log))
    return EXIT_OK


def _log_value(v):
    return jsonl.box_to_dict(v) if hasattr(v, "x_min") else v


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--profile", help="league profile file (JSON)")
    common.add_argument("--league", help="league id: a preset (nba, nfl, nhl, soccer) or a key of --profile")
    common.add_argument("--format", choices=("jsonl", "json", "csv", "text"), help="output format")

    ap = argparse.ArgumentParser(prog="clockdistill", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", parents=[common], help="filter noisy clock OCR into clean labels")
    p.add_argument("input", help="records JSONL, or - for stdin")
    p.add_argument("-o", "--out", default="-", help="outcomes output (default stdout)")
    p.add_argument("--report", help="report JSON output (default stderr)")
    p.add_argument("--hard-negatives", help="write KC1-rejected record ids here, one per line")
    p.add_argument("--mode", choices=[m.value for m in Kc4Mode], default=Kc4Mode.DISCARD.value)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("align", parents=[common], help="align clean readings with a play-by-play feed")
    p.add_argument("readings", help="readings JSONL or outcomes JSONL from clean")
    p.add_argument("feed", help="feed JSONL")
    p.add_argument("-o", "--out", required=True, help="segments JSONL output")
    p.add_argument("--max-gap", type=int, default=3, help="largest frame gap inside one run")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("stats", parents=[common], help="size and aspect-ratio quartiles per league")
    p.add_argument("input")
    p.add_argument("-o", "--out", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plan-augment", parents=[common], help="plan size-balancing rescales")
    p.add_argument("input")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--axis", choices=[a.value for a in Axis], default=Axis.WIDTH.value)
    p.add_argument("--edges", help="comma-separated bucket edges")
    p.add_argument("--buckets", type=int, default=8, help="bucket count when no edges are given")
    p.add_argument("--range", help="s_min,s_max (default 0.4,1.2)")
    p.add_argument("--per-style", type=int, help="stratified sample of k records per clock style first")
    p.set_defaults(func=cmd_plan_augment)

    p = sub.add_parser("resize", parents=[common], help="grid-constrained resize targets")
    p.add_argument("sizes", nargs="*", help="sizes as WxH")
    p.add_argument("--input", help="take crop sizes from a records JSONL")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--grid", type=int)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.AMALGAMATED.value)
    p.set_defaults(func=cmd_resize)

    p = sub.add_parser("eval", parents=[common], help="detection / recognition / end-to-end metrics")
    p.add_argument("input", help="evaluation JSONL: {image_id, preds[], gts[]}")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--thresholds", help="comma-separated IoU thresholds")
    p.add_argument("--macro", action="store_true", help="average per image instead of over the corpus")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", parents=[common], help="generate synthetic games")
    p.add_argument("-o", "--out", default="-", help="records JSONL")
    p.add_argument("--videos", type=int, default=1)
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--fps", type=float, default=1.0)
    p.add_argument("--char-sub", type=float, default=0.0)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--drop", type=float, default=0.0)
    p.add_argument("--spike", type=float, default=0.0)
    p.add_argument("--highlights", action="store_true", help="cut clips together instead of one broadcast")
    p.add_argument("--feed-out", help="write the play-by-play feed here")
    p.add_argument("--truth-out", help="write ground-truth readings here")
    p.add_argument("--log-out", help="write the corruption log here")
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except InfeasibleConfiguration as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ClockDistillError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
