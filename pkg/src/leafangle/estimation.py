"""Core leaf-angle algorithm: filter stem/noise segments, pick the dominant
orientation, and emit the per-image angle estimate."""

import math
from dataclasses import dataclass, field

from .config import PipelineConfig
from .errors import NoInstanceError, NoLeafLinesError
from .geometry import boundary_distance, orientation_deg, segment_length
from .records import DetectionRecord, LineSegment
from .roi import RoiImage

SELECTION_MODE = "mode"
SELECTION_MEDIAN = "median"

FLAG_LOW_SHARPNESS = "low_sharpness"
FLAG_MULTI_INSTANCE = "multi_instance"
FLAG_MEDIAN_FALLBACK = "median_fallback"


@dataclass(frozen=True)
class AngleEstimate:
    """Per-image output: the angle plus how it was obtained."""

    image_id: str
    angle_deg: float
    segments_total: int
    segments_retained: int
    segments_in_mode: int
    selection: str  # SELECTION_MODE or SELECTION_MEDIAN
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not 0.0 <= self.angle_deg <= 90.0:
            raise ValueError(f"angle_deg must be in [0, 90], got {self.angle_deg}")
        if not 0 <= self.segments_in_mode <= self.segments_retained <= self.segments_total:
            raise ValueError(
                "segment counts must satisfy in_mode <= retained <= total, got "
                f"{self.segments_in_mode}/{self.segments_retained}/{self.segments_total}"
            )
        if (self.selection == SELECTION_MEDIAN) != (FLAG_MEDIAN_FALLBACK in self.flags):
            raise ValueError("median selection and the median_fallback flag must agree")


def filter_segments(
    segments: list[LineSegment] | tuple[LineSegment, ...],
    width: int,
    height: int,
    config: PipelineConfig,
) -> list[LineSegment]:
    """Drop segments that look like stem: steep AND hugging the image border.

    A segment is removed iff its orientation falls inside
    [slope_band_low_deg, slope_band_high_deg] (inclusive) and its border
    distance is strictly below boundary_min_px. Both conditions are required;
    a steep segment far from the border is kept because the leaf itself can
    be steep. Order is preserved.
    """
    kept = []
    for segment in segments:
        steep = (
            config.slope_band_low_deg
            <= orientation_deg(segment)
            <= config.slope_band_high_deg
        )
        near_border = boundary_distance(segment, width, height) < config.boundary_min_px
        if not (steep and near_border):
            kept.append(segment)
    return kept


def _bin_index(orientation: float, bin_deg: float) -> int:
    return math.floor(orientation / bin_deg)


def select_dominant_segments(
    retained: list[LineSegment] | tuple[LineSegment, ...],
    config: PipelineConfig,
    image_id: str = "<unknown>",
) -> tuple[list[LineSegment], str]:
    """Pick the segments carrying the dominant leaf orientation.

    Orientations are quantized into orientation_bin_deg bins. If any bin
    holds two or more segments, the most populated bin wins and all its
    segments are returned (selection "mode"); ties between equally full bins
    go to the bin containing the longest single segment, then to the smaller
    bin index. If every bin holds exactly one segment there is no mode, and
    the single segment whose orientation is the lower median of all
    orientations is returned (selection "median").
    """
    if not retained:
        raise NoLeafLinesError(image_id)

    bins: dict[int, list[LineSegment]] = {}
    for segment in retained:
        bins.setdefault(
            _bin_index(orientation_deg(segment), config.orientation_bin_deg), []
        ).append(segment)

    max_count = max(len(members) for members in bins.values())
    if max_count >= 2:
        winner = max(
            bins,
            key=lambda index: (
                len(bins[index]),
                max(segment_length(s) for s in bins[index]),
                -index,
            ),
        )
        return list(bins[winner]), SELECTION_MODE

    ordered = sorted(retained, key=orientation_deg)
    median_segment = ordered[(len(ordered) - 1) // 2]
    return [median_segment], SELECTION_MEDIAN


def estimate_angle(
    record: DetectionRecord,
    roi: RoiImage | None,
    config: PipelineConfig,
) -> AngleEstimate:
    """Run the per-image pipeline: filter, select, average, flag.

    Segments are interpreted in the ROI frame when `roi` is given (border
    distances then use the ROI dimensions) and in the full-image frame
    otherwise. The angle is the arithmetic mean orientation of the dominant
    segments.
    """
    survivors = [i for i in record.instances if i.score >= config.min_instance_score]
    if not survivors:
        raise NoInstanceError(record.image_id)

    if roi is not None:
        frame_height, frame_width = roi.pixels.shape[:2]
    else:
        frame_width, frame_height = record.width, record.height

    retained = filter_segments(record.segments, frame_width, frame_height, config)
    if not retained:
        raise NoLeafLinesError(record.image_id)
    dominant, selection = select_dominant_segments(retained, config, record.image_id)
    # fsum keeps the mean independent of segment input order (exact rounding)
    angle = math.fsum(orientation_deg(s) for s in dominant) / len(dominant)

    flags = set()
    if selection == SELECTION_MEDIAN:
        flags.add(FLAG_MEDIAN_FALLBACK)
    if len(record.instances) > 1:
        flags.add(FLAG_MULTI_INSTANCE)
    if roi is not None and roi.sharpness < config.sharpness_warn_threshold:
        flags.add(FLAG_LOW_SHARPNESS)

    return AngleEstimate(
        image_id=record.image_id,
        angle_deg=angle,
        segments_total=len(record.segments),
        segments_retained=len(retained),
        segments_in_mode=len(dominant),
        selection=selection,
        flags=frozenset(flags),
    )
