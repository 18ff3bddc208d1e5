"""Leaf-stem angle estimation from instance masks and detected line segments."""

__version__ = "0.1.0"

from .config import PipelineConfig, load_config
from .errors import (
    ConfigError,
    DecodeError,
    GenerationError,
    GeometryError,
    JoinError,
    MetricError,
    NoInstanceError,
    NoLeafLinesError,
    PipelineError,
    SchemaError,
    ShapeError,
)
from .estimation import AngleEstimate, estimate_angle, filter_segments, select_dominant_segments
from .evaluation import (
    EvaluationReport,
    MeasurementSet,
    compare,
    cosine_similarity,
    implied_angle_deg,
)
from .geometry import boundary_distance, orientation_deg, segment_length
from .records import (
    DetectionRecord,
    InstanceDetection,
    InstanceMask,
    LineSegment,
    MaskEncoding,
    decode_mask,
    encode_rle,
    load_batch,
    parse_detection_record,
    record_to_json,
    serialize_detection_record,
)
from .roi import RoiImage, apply_mask, crop_roi, select_primary_instance, sharpness_score
from .synth import FixtureSpec, generate_fixture

__all__ = [
    "AngleEstimate",
    "ConfigError",
    "DecodeError",
    "DetectionRecord",
    "EvaluationReport",
    "FixtureSpec",
    "GenerationError",
    "GeometryError",
    "InstanceDetection",
    "InstanceMask",
    "JoinError",
    "LineSegment",
    "MaskEncoding",
    "MeasurementSet",
    "MetricError",
    "NoInstanceError",
    "NoLeafLinesError",
    "PipelineConfig",
    "PipelineError",
    "RoiImage",
    "SchemaError",
    "ShapeError",
    "apply_mask",
    "boundary_distance",
    "compare",
    "cosine_similarity",
    "crop_roi",
    "decode_mask",
    "encode_rle",
    "estimate_angle",
    "filter_segments",
    "generate_fixture",
    "implied_angle_deg",
    "load_batch",
    "load_config",
    "orientation_deg",
    "parse_detection_record",
    "record_to_json",
    "segment_length",
    "select_dominant_segments",
    "select_primary_instance",
    "serialize_detection_record",
    "sharpness_score",
]
