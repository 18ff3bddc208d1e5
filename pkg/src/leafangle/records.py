"""Detection-record interchange format: types, parsing, and mask decoding.

A detection record is the wire unit between model inference and this
pipeline: one JSON document per image carrying instance masks (COCO-style
polygon or uncompressed RLE) and detected line segments. The schema here is
the bit-exact contract with whatever produced the detections.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

import numpy as np

from .errors import DecodeError, GeometryError, SchemaError, ShapeError

# Segment endpoints may overshoot the image extent [0, width] by up to
# this much (detectors emit subpixel coordinates); anything worse is an error.
CLAMP_TOLERANCE_PX = 1.0


@dataclass(frozen=True)
class LineSegment:
    """One detected line segment in pixel coordinates (y grows downward)."""

    x1: float
    y1: float
    x2: float
    y2: float
    score: float


@dataclass(frozen=True)
class MaskEncoding:
    """A mask as either a polygon or uncompressed column-major RLE counts.

    Exactly one of `polygon` / `rle` is set. RLE counts alternate
    background/foreground starting with background, column-major (the COCO
    uncompressed convention). Compressed RLE strings are not supported.
    """

    polygon: tuple[tuple[float, float], ...] | None = None
    rle: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.polygon is None) == (self.rle is None):
            raise SchemaError("mask must have exactly one of 'polygon' or 'rle'", field="mask")
        if self.polygon is not None and len(self.polygon) < 3:
            raise SchemaError(
                f"polygon needs at least 3 vertices, got {len(self.polygon)}",
                field="mask.polygon",
            )
        if self.rle is not None and any(c < 0 for c in self.rle):
            raise SchemaError("rle counts must be non-negative", field="mask.rle")


@dataclass(frozen=True)
class InstanceDetection:
    """One instance detection: confidence, mask encoding, and bounding box."""

    score: float
    mask: MaskEncoding
    bbox: tuple[float, float, float, float]  # x, y, w, h


@dataclass(frozen=True)
class DetectionRecord:
    """Per-image bundle of instance detections and line segments."""

    image_id: str
    width: int
    height: int
    instances: tuple[InstanceDetection, ...]
    segments: tuple[LineSegment, ...]
    source: str = ""


@dataclass(frozen=True)
class InstanceMask:
    """Decoded binary mask; `bits` is a read-only (height, width) bool array."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.shape != (self.height, self.width):
            raise ShapeError(
                f"mask bits shape {self.bits.shape} does not match "
                f"(height, width) ({self.height}, {self.width})"
            )
        self.bits.setflags(write=False)

    def area(self) -> int:
        return int(self.bits.sum())


def _require(obj: dict, field: str, context: str) -> Any:
    if field not in obj:
        raise SchemaError(f"missing required field {field!r} in {context}", field=field)
    return obj[field]


def _reject_unknown(obj: dict, allowed: set[str], context: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"unknown field {unknown[0]!r} in {context}", field=unknown[0])


def _check_score(value: Any, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"score in {context} must be a number, got {value!r}", field="score")
    if not 0.0 <= value <= 1.0:
        raise SchemaError(f"score in {context} must be in [0, 1], got {value}", field="score")
    return float(value)


def _clamp_coord(value: float, limit: int, image_id: str, index: int, name: str) -> float:
    """Clamp one endpoint coordinate into [0, limit - 1].

    Coordinates up to CLAMP_TOLERANCE_PX outside the image extent
    [0, limit] are pulled in; anything further out is a geometry error.
    """
    if value < -CLAMP_TOLERANCE_PX or value > limit + CLAMP_TOLERANCE_PX:
        raise GeometryError(
            f"segment {index} of image {image_id!r}: {name}={value} is more than "
            f"{CLAMP_TOLERANCE_PX} px outside the {limit}-px image extent",
            image_id=image_id,
            index=index,
        )
    return min(max(value, 0.0), float(limit - 1))


def _parse_segment(obj: Any, width: int, height: int, image_id: str, index: int) -> LineSegment:
    context = f"segments[{index}]"
    if not isinstance(obj, dict):
        raise SchemaError(f"{context} must be an object", field=context)
    _reject_unknown(obj, {"x1", "y1", "x2", "y2", "score"}, context)
    coords = {}
    for name in ("x1", "y1", "x2", "y2"):
        value = _require(obj, name, context)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{context}.{name} must be a number, got {value!r}", field=name)
        limit = width if name[0] == "x" else height
        coords[name] = _clamp_coord(float(value), limit, image_id, index, name)
    score = _check_score(_require(obj, "score", context), context)
    if math.hypot(coords["x2"] - coords["x1"], coords["y2"] - coords["y1"]) <= 0.0:
        raise GeometryError(
            f"segment {index} of image {image_id!r} has zero length after clamping",
            image_id=image_id,
            index=index,
        )
    return LineSegment(coords["x1"], coords["y1"], coords["x2"], coords["y2"], score)


def _parse_mask(obj: Any, width: int, height: int, context: str) -> MaskEncoding:
    if not isinstance(obj, dict):
        raise SchemaError(f"{context}.mask must be an object", field="mask")
    _reject_unknown(obj, {"polygon", "rle"}, f"{context}.mask")
    if "polygon" in obj and "rle" in obj:
        raise SchemaError(f"{context}.mask has both 'polygon' and 'rle'", field="mask")
    if "polygon" in obj:
        raw = obj["polygon"]
        if not isinstance(raw, list) or any(
            not isinstance(v, list) or len(v) != 2 for v in raw
        ):
            raise SchemaError(f"{context}.mask.polygon must be a list of [x, y] pairs", field="mask.polygon")
        return MaskEncoding(polygon=tuple((float(x), float(y)) for x, y in raw))
    if "rle" in obj:
        raw = obj["rle"]
        if not isinstance(raw, list) or any(
            isinstance(c, bool) or not isinstance(c, int) for c in raw
        ):
            raise SchemaError(f"{context}.mask.rle must be a list of integers", field="mask.rle")
        encoding = MaskEncoding(rle=tuple(raw))
        if sum(encoding.rle) != width * height:
            raise DecodeError(
                f"{context}.mask.rle counts sum to {sum(encoding.rle)}, "
                f"expected width*height = {width * height}"
            )
        return encoding
    raise SchemaError(f"{context}.mask must have 'polygon' or 'rle'", field="mask")


def _parse_instance(obj: Any, width: int, height: int, image_id: str, index: int) -> InstanceDetection:
    context = f"instances[{index}]"
    if not isinstance(obj, dict):
        raise SchemaError(f"{context} must be an object", field=context)
    _reject_unknown(obj, {"score", "bbox", "mask"}, context)
    score = _check_score(_require(obj, "score", context), context)
    bbox_raw = _require(obj, "bbox", context)
    if not isinstance(bbox_raw, list) or len(bbox_raw) != 4 or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in bbox_raw
    ):
        raise SchemaError(f"{context}.bbox must be [x, y, w, h]", field="bbox")
    x, y, w, h = (float(v) for v in bbox_raw)
    if w < 0 or h < 0 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise GeometryError(
            f"{context} of image {image_id!r}: bbox {bbox_raw} outside "
            f"{width}x{height} image",
            image_id=image_id,
            index=index,
        )
    mask = _parse_mask(_require(obj, "mask", context), width, height, context)
    return InstanceDetection(score=score, mask=mask, bbox=(x, y, w, h))


def parse_detection_record(data: bytes | str | dict) -> DetectionRecord:
    """Parse and fully validate one detection-record document.

    Accepts raw JSON bytes/text or an already-decoded dict. Segment
    endpoints up to 1 px outside the image extent are clamped into the
    valid pixel range; anything further out, zero-length segments, bad
    scores, and schema violations raise.
    """
    if isinstance(data, (bytes, str)):
        try:
            obj = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"record is not valid JSON: {exc}") from exc
    else:
        obj = data
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object")
    _reject_unknown(
        obj, {"image_id", "width", "height", "source", "instances", "segments"}, "record"
    )

    image_id = _require(obj, "image_id", "record")
    if not isinstance(image_id, str) or not image_id:
        raise SchemaError("image_id must be a non-empty string", field="image_id")
    width = _require(obj, "width", "record")
    height = _require(obj, "height", "record")
    for name, value in (("width", width), ("height", height)):
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise SchemaError(f"{name} must be a positive integer, got {value!r}", field=name)
    source = obj.get("source", "")
    if not isinstance(source, str):
        raise SchemaError("source must be a string", field="source")

    instances_raw = _require(obj, "instances", "record")
    segments_raw = _require(obj, "segments", "record")
    if not isinstance(instances_raw, list):
        raise SchemaError("instances must be a list", field="instances")
    if not isinstance(segments_raw, list):
        raise SchemaError("segments must be a list", field="segments")

    instances = tuple(
        _parse_instance(item, width, height, image_id, i) for i, item in enumerate(instances_raw)
    )
    segments = tuple(
        _parse_segment(item, width, height, image_id, i) for i, item in enumerate(segments_raw)
    )
    return DetectionRecord(
        image_id=image_id,
        width=width,
        height=height,
        instances=instances,
        segments=segments,
        source=source,
    )


def serialize_detection_record(record: DetectionRecord) -> dict:
    """Invert parse_detection_record; parse(serialize(r)) == r for valid r."""
    instances = []
    for inst in record.instances:
        if inst.mask.polygon is not None:
            mask: dict[str, Any] = {"polygon": [[x, y] for x, y in inst.mask.polygon]}
        else:
            mask = {"rle": list(inst.mask.rle)}
        instances.append({"score": inst.score, "bbox": list(inst.bbox), "mask": mask})
    return {
        "image_id": record.image_id,
        "width": record.width,
        "height": record.height,
        "source": record.source,
        "instances": instances,
        "segments": [
            {"x1": s.x1, "y1": s.y1, "x2": s.x2, "y2": s.y2, "score": s.score}
            for s in record.segments
        ],
    }


def record_to_json(record: DetectionRecord) -> str:
    return json.dumps(serialize_detection_record(record), indent=2, sort_keys=True)


def load_batch(path: str | Path) -> list[DetectionRecord]:
    """Load a batch: a directory of *.json records or one file (record or list).

    Records are returned sorted by image_id; duplicate ids are an error.
    """
    records = list(iter_batch(path))
    seen: set[str] = set()
    for record in records:
        if record.image_id in seen:
            raise SchemaError(
                f"duplicate image_id {record.image_id!r} in batch", field="image_id"
            )
        seen.add(record.image_id)
    return sorted(records, key=lambda r: r.image_id)


def iter_batch(path: str | Path) -> Iterator[DetectionRecord]:
    path = Path(path)
    if path.is_dir():
        for doc in sorted(path.glob("*.json")):
            yield parse_detection_record(doc.read_bytes())
        return
    payload = json.loads(path.read_bytes())
    if isinstance(payload, list):
        for item in payload:
            yield parse_detection_record(item)
    else:
        yield parse_detection_record(payload)


def _decode_rle(counts: tuple[int, ...], width: int, height: int) -> np.ndarray:
    if sum(counts) != width * height:
        raise DecodeError(
            f"rle counts sum to {sum(counts)}, expected width*height = {width * height}"
        )
    flat = np.zeros(width * height, dtype=bool)
    pos = 0
    value = False
    for count in counts:
        if value:
            flat[pos : pos + count] = True
        pos += count
        value = not value
    # Column-major: consecutive counts run down each column.
    return flat.reshape((width, height)).T


def _decode_polygon(vertices: tuple[tuple[float, float], ...], width: int, height: int) -> np.ndarray:
    """Rasterize a polygon: pixel (x, y) is set iff its center lies inside.

    Pixel centers sit at integer coordinates. Inside-ness uses the even-odd
    (ray crossing) rule, evaluated vectorized over the whole grid.
    """
    xs = np.arange(width, dtype=float)
    ys = np.arange(height, dtype=float)
    px, py = np.meshgrid(xs, ys)
    inside = np.zeros((height, width), dtype=bool)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at_py = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        hits = crosses & (px < x_at_py)
        inside ^= hits
    return inside


def decode_mask(encoding: MaskEncoding, width: int, height: int) -> InstanceMask:
    """Decode a mask encoding to a binary grid for a width x height image.

    RLE counts are column-major alternating background/foreground runs
    starting with background and must sum to width*height. Polygons are
    rasterized with the pixel-center even-odd rule.
    """
    if width <= 0 or height <= 0:
        raise DecodeError(f"target grid {width}x{height} is empty")
    if encoding.rle is not None:
        bits = _decode_rle(encoding.rle, width, height)
    else:
        if len(encoding.polygon) < 3:
            raise DecodeError(f"polygon needs at least 3 vertices, got {len(encoding.polygon)}")
        bits = _decode_polygon(encoding.polygon, width, height)
    return InstanceMask(width=width, height=height, bits=bits)


def encode_rle(bits: np.ndarray) -> MaskEncoding:
    """Encode a (height, width) binary grid as uncompressed column-major RLE."""
    flat = np.asarray(bits, dtype=bool).T.ravel()
    boundaries = np.flatnonzero(np.diff(flat)) + 1
    edges = np.concatenate(([0], boundaries, [flat.size]))
    counts = np.diff(edges).tolist()
    if flat.size and flat[0]:
        counts = [0] + counts  # runs must start with a background count
    return MaskEncoding(rle=tuple(int(c) for c in counts))
