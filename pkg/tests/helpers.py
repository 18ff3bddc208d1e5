"""Shared helpers for building test geometry."""

import math

from leafangle import LineSegment


def seg(x1, y1, x2, y2, score=0.9):
    return LineSegment(x1=float(x1), y1=float(y1), x2=float(x2), y2=float(y2), score=score)


def seg_at(orientation_deg, length, x0=300.0, y0=300.0, score=0.9):
    """Build a segment with an exact orientation and length from a start point."""
    theta = math.radians(orientation_deg)
    return seg(x0, y0, x0 + length * math.cos(theta), y0 + length * math.sin(theta), score)


def record_doc(
    image_id="img-1",
    width=640,
    height=480,
    segments=None,
    instances=None,
    source="test",
):
    """A schema-valid record document (plain dict) with overridable parts."""
    if segments is None:
        segments = [{"x1": 10.0, "y1": 10.0, "x2": 100.0, "y2": 60.0, "score": 0.8}]
    if instances is None:
        instances = [
            {
                "score": 0.9,
                "bbox": [0.0, 0.0, float(width), float(height)],
                "mask": {"rle": [0, width * height]},
            }
        ]
    return {
        "image_id": image_id,
        "width": width,
        "height": height,
        "source": source,
        "instances": instances,
        "segments": segments,
    }
