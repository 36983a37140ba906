"""Distant supervision for broadcast clock text.

Noisy OCR of scoreboard overlays is filtered with domain knowledge (which
texts a clock must show, how clock values move) into clean labels, then
aligned with play-by-play feeds. Helpers cover grid resizing, size-balancing
augmentation plans, evaluation metrics and a synthetic data generator.
"""

from .align import (AlignedSegment, FeedIndex, FrameRun, PlayEvent, align_segments, alignment_stats,
                    segment_readings)
from .augment import (AugmentPlan, Axis, BucketHistogram, build_histogram, plan_augmentation,
                      plan_label_correction, stratified_sample)
from .errors import (ClockDistillError, DegenerateHistogram, EmptyEvalSet, EmptyInput, InfeasibleConfiguration,
                     RecordInvalid, SchemaError)
from .evalkit import (ClassScope, EvalConfig, EvalImage, MatchResult, detection_pr, e2e_metrics, match_boxes,
                      metrics_table, recognition_accuracy)
from .geometry import Strategy, compare_strategies, iou, resize_to_grid, scale_box
from .kc_engine import (DistillReport, Kc4Mode, KcOutcome, KcStatus, distill, extract_reading, kc1_check,
                        kc2_resolve_quarter, kc3_select_time, kc4_temporal_filter)
from .model import (Box, ClockRecord, Direction, GameClockReading, LeagueProfile, SemanticClass, TextDetection,
                    TimeFormId, canonicalize, validate_record)
from .profiles import NBA, NFL, NHL, PRESETS, SOCCER, get_profile
from .surface_form import classify, parse_quarter, parse_time
from .synth import NoiseSpec, SynthGame, corrupt, generate_game

__version__ = "0.1.0"
