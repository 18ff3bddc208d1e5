import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import seg
from leafangle import GeometryError, boundary_distance, orientation_deg, segment_length

# Derived by independent evaluation: degrees(atan(0.57735)).
ORIENT_10_57735 = 29.99998843242657


def test_unit_slope_is_45_degrees():
    assert orientation_deg(seg(0, 0, 10, 10)) == 45.0


def test_vertical_is_exactly_90():
    assert orientation_deg(seg(5, 0, 5, 8)) == 90.0


def test_horizontal_is_exactly_0():
    assert orientation_deg(seg(0, 5, 8, 5)) == 0.0


def test_known_arctan_value():
    assert orientation_deg(seg(0, 0, 10, 5.7735)) == pytest.approx(
        ORIENT_10_57735, abs=1e-9
    )


def test_zero_length_orientation_rejected():
    with pytest.raises(GeometryError):
        orientation_deg(seg(2, 2, 2, 2))


def test_3_4_5_length():
    assert segment_length(seg(0, 0, 3, 4)) == 5.0


def test_degenerate_length_is_zero():
    assert segment_length(seg(2, 2, 2, 2)) == 0.0


def test_boundary_distance_interior_segment():
    assert boundary_distance(seg(100, 100, 200, 200), 640, 480) == 100.0


def test_boundary_distance_touching_border():
    assert boundary_distance(seg(0, 50, 30, 80), 640, 480) == 0.0


in_bounds_coord = st.floats(min_value=0.0, max_value=639.0, allow_nan=False)
in_bounds_y = st.floats(min_value=0.0, max_value=479.0, allow_nan=False)


@given(x1=in_bounds_coord, y1=in_bounds_y, x2=in_bounds_coord, y2=in_bounds_y)
def test_orientation_is_endpoint_order_invariant(x1, y1, x2, y2):
    if x1 == x2 and y1 == y2:
        return
    assert orientation_deg(seg(x1, y1, x2, y2)) == orientation_deg(seg(x2, y2, x1, y1))
    assert 0.0 <= orientation_deg(seg(x1, y1, x2, y2)) <= 90.0


exact_coord = st.integers(min_value=0, max_value=639).map(lambda v: v / 2.0)
exact_y = st.integers(min_value=0, max_value=479).map(lambda v: v / 2.0)


@given(x1=exact_coord, y1=exact_y, x2=exact_coord, y2=exact_y)
def test_orientation_is_reflection_invariant(x1, y1, x2, y2):
    # half-integer coordinates keep the reflection exact in float arithmetic
    if x1 == x2 and y1 == y2:
        return
    flipped = seg(x1, 479.0 - y1, x2, 479.0 - y2)
    assert orientation_deg(seg(x1, y1, x2, y2)) == orientation_deg(flipped)


@given(x1=in_bounds_coord, y1=in_bounds_y, x2=in_bounds_coord, y2=in_bounds_y)
def test_length_matches_hypot(x1, y1, x2, y2):
    assert segment_length(seg(x1, y1, x2, y2)) == math.hypot(x2 - x1, y2 - y1)


@settings(max_examples=50)
@given(x1=in_bounds_coord, y1=in_bounds_y, x2=in_bounds_coord, y2=in_bounds_y)
def test_boundary_distance_matches_dense_sampling(x1, y1, x2, y2):
    def point_distance(x, y):
        return min(x, y, 639.0 - x, 479.0 - y)

    sampled = min(
        point_distance(x1 + t * (x2 - x1), y1 + t * (y2 - y1))
        for t in (i / 999.0 for i in range(1000))
    )
    endpoint_min = boundary_distance(seg(x1, y1, x2, y2), 640, 480)
    assert endpoint_min == pytest.approx(sampled, abs=1e-9)
    # concavity: no sampled interior point is closer to the border
    assert endpoint_min <= sampled + 1e-9
