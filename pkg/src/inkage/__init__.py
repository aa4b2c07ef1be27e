"""Online handwriting features and their correlation with writer age."""

from .capture import Recording, Sample, Stroke, StrokeKind, WriterMeta, segment_strokes, validate_recording
from .features import FEATURE_NAMES, FeatureVector, entropy, extract, teager, zero_crossing_rate
from .ingest import parse_capture, parse_metadata, scan_corpus, write_capture
from .kinematics import derivative, derive
from .stats import classify_band, correlate_cohort, histogram, p_value, pearson, scatter_pairs

__version__ = "0.1.0"

__all__ = [
    "FEATURE_NAMES",
    "FeatureVector",
    "Recording",
    "Sample",
    "Stroke",
    "StrokeKind",
    "WriterMeta",
    "classify_band",
    "correlate_cohort",
    "derivative",
    "derive",
    "entropy",
    "extract",
    "histogram",
    "p_value",
    "parse_capture",
    "parse_metadata",
    "pearson",
    "scan_corpus",
    "scatter_pairs",
    "segment_strokes",
    "teager",
    "validate_recording",
    "write_capture",
    "zero_crossing_rate",
]
