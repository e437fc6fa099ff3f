"""Prosodic analysis toolkit.

TextGrid annotation mining, F0 tracking and polynomial stylisation, timing
irregularity metrics (SD, CoeffVar, rPVI, nPVI, Deterding VI, moving-window
nPVI), semitone/interval analysis, a terraced-tone transducer, and SVG plots.
"""

from .annotation import (
    Annotation,
    DurationSeries,
    LabelledInterval,
    Tier,
    extract_durations,
    group_by_label,
    parse_textgrid,
    serialize_textgrid,
)
from .errors import ProsodyError
from .metrics import (
    box_stats,
    coeff_var,
    metrics_report,
    moving_npvi,
    npvi,
    rpvi,
    sd,
    speech_rate,
    vi_deterding,
)
from .scales import chroma_analyze, hz_to_semitones, semitones_to_ratio
from .signal import F0Params, F0Track, SampledSignal, estimate_f0, ingest_f0_csv, read_wav
from .stylization import linear_fit, median_filter, mps_stylize, poly_fit
from .tonefst import annotate_steps, apply_rules, transduce

__version__ = "0.1.0"

__all__ = [
    "Annotation", "DurationSeries", "F0Params", "F0Track", "LabelledInterval",
    "ProsodyError", "SampledSignal", "Tier", "annotate_steps", "apply_rules", "box_stats",
    "chroma_analyze", "coeff_var", "estimate_f0", "extract_durations", "group_by_label",
    "hz_to_semitones", "ingest_f0_csv", "linear_fit", "median_filter", "metrics_report",
    "moving_npvi", "mps_stylize", "npvi", "parse_textgrid", "poly_fit", "read_wav", "rpvi",
    "sd", "semitones_to_ratio", "serialize_textgrid", "speech_rate", "transduce",
    "vi_deterding",
]
