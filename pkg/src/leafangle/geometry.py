"""Elementary line-segment geometry: orientation, length, border distance."""

import math

from .errors import GeometryError
from .records import LineSegment


def orientation_deg(segment: LineSegment) -> float:
    """Unsigned orientation of a segment with the horizontal, in [0, 90] degrees.

    Computed as atan2(|dy|, |dx|) so vertical segments come out exactly 90.
    Using absolute deltas makes the result independent of endpoint order,
    tilt direction, and the image's y-down convention.
    """
    dx = abs(segment.x2 - segment.x1)
    dy = abs(segment.y2 - segment.y1)
    if dx == 0.0 and dy == 0.0:
        raise GeometryError("zero-length segment has no orientation")
    return math.degrees(math.atan2(dy, dx))


def segment_length(segment: LineSegment) -> float:
    """Euclidean length of the segment in pixels."""
    return math.hypot(segment.x2 - segment.x1, segment.y2 - segment.y1)


def boundary_distance(segment: LineSegment, width: int, height: int) -> float:
    """Shortest distance from the segment to the image border, in pixels.

    The border sits at pixel indices 0 and width-1 / height-1. The pointwise
    border distance min(x, y, W-1-x, H-1-y) is a minimum of linear functions,
    hence concave along the segment and minimized at an endpoint, so checking
    the two endpoints is exact.
    """
    def point_distance(x: float, y: float) -> float:
        return min(x, y, (width - 1) - x, (height - 1) - y)

    return min(
        point_distance(segment.x1, segment.y1),
        point_distance(segment.x2, segment.y2),
    )
