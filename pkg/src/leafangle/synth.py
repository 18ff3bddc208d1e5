"""Synthetic detection-record fixtures with known ground-truth angles.

Fixtures let the whole pipeline be exercised without neural networks or
field data: leaf segments carry the requested orientation, stem segments are
built to be removed by the slope+boundary filter, and distractors occupy
minority orientation bins. Generation is a pure function of the seed
(stdlib Mersenne Twister via random.Random, fixed algorithm).
"""

import math
import random
from dataclasses import dataclass

from .config import PipelineConfig
from .errors import GenerationError
from .records import DetectionRecord, InstanceDetection, LineSegment, MaskEncoding

# Keep generated geometry this far away from the filter's decision
# boundaries so fixtures never sit on a rule edge.
PLACEMENT_MARGIN_PX = 20
_LENGTH_RANGE = (40.0, 160.0)
_EPS = 1e-6


@dataclass(frozen=True)
class FixtureSpec:
    """Recipe for one synthetic detection record."""

    true_angle_deg: float
    n_leaf_segments: int = 3
    n_stem_segments: int = 3
    n_distractors: int = 2
    jitter_deg: float = 0.3
    image_size: tuple[int, int] = (1000, 1000)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.true_angle_deg < 80.0:
            raise GenerationError(
                f"true_angle_deg must be in (0, 80), got {self.true_angle_deg}"
            )
        if self.n_leaf_segments < 0 or self.n_stem_segments < 0 or self.n_distractors < 0:
            raise GenerationError("segment counts must be non-negative")
        if self.jitter_deg < 0:
            raise GenerationError(f"jitter_deg must be >= 0, got {self.jitter_deg}")
        if self.image_size[0] < 2 or self.image_size[1] < 2:
            raise GenerationError(f"image_size {self.image_size} is too small")


def _snap_into_bin(angle: float, jitter: float, bin_deg: float) -> float:
    """Nudge the angle so its whole jitter window stays inside one bin."""
    index = math.floor(angle / bin_deg)
    low = index * bin_deg + jitter + _EPS
    high = (index + 1) * bin_deg - jitter - _EPS
    if low > high:
        raise GenerationError(
            f"jitter_deg {jitter} does not fit inside a {bin_deg}-degree bin"
        )
    return min(max(angle, low), high)


def _place_segment(
    rng: random.Random,
    orientation: float,
    lo: float,
    hi_x: float,
    hi_y: float,
    score: float,
) -> LineSegment:
    """Place a segment at the given orientation with both endpoints in a box."""
    theta = math.radians(orientation)
    for _ in range(100):
        length = rng.uniform(*_LENGTH_RANGE)
        hx = length / 2.0 * math.cos(theta)
        hy = length / 2.0 * math.sin(theta)
        if lo + hx > hi_x - hx or lo + hy > hi_y - hy:
            continue  # too long for the box, redraw
        cx = rng.uniform(lo + hx, hi_x - hx)
        cy = rng.uniform(lo + hy, hi_y - hy)
        tilt = rng.choice((-1.0, 1.0))  # leaves tilt either way
        return LineSegment(
            x1=cx - hx, y1=cy - tilt * hy, x2=cx + hx, y2=cy + tilt * hy, score=score
        )
    raise GenerationError(
        f"cannot place a segment at {orientation:.2f} degrees inside the box "
        f"[{lo:.0f}, {hi_x:.0f}] x [{lo:.0f}, {hi_y:.0f}]"
    )


def _place_stem_segment(
    rng: random.Random,
    orientation: float,
    width: int,
    height: int,
    max_border_distance: float,
    score: float,
) -> LineSegment:
    """Place a steep segment with at least one endpoint hugging a border."""
    theta = math.radians(orientation)
    for _ in range(100):
        length = rng.uniform(*_LENGTH_RANGE)
        dx = length * math.cos(theta)
        dy = length * math.sin(theta)
        side = rng.randrange(4)  # 0 left, 1 right, 2 top, 3 bottom
        d0 = rng.uniform(1.0, max_border_distance - 1.0)
        if side == 0:
            x1, y1 = d0, rng.uniform(0.0, height - 1.0)
        elif side == 1:
            x1, y1 = (width - 1.0) - d0, rng.uniform(0.0, height - 1.0)
        elif side == 2:
            x1, y1 = rng.uniform(0.0, width - 1.0), d0
        else:
            x1, y1 = rng.uniform(0.0, width - 1.0), (height - 1.0) - d0
        x2 = x1 + rng.choice((-1.0, 1.0)) * dx
        y2 = y1 + rng.choice((-1.0, 1.0)) * dy
        if 0.0 <= x2 <= width - 1.0 and 0.0 <= y2 <= height - 1.0:
            return LineSegment(x1=x1, y1=y1, x2=x2, y2=y2, score=score)
    raise GenerationError(
        f"cannot place a stem segment within {max_border_distance:.0f} px of a border "
        f"in a {width}x{height} image"
    )


def generate_fixture(
    spec: FixtureSpec, config: PipelineConfig | None = None
) -> tuple[DetectionRecord, float]:
    """Build one detection record plus the ground-truth angle it encodes.

    The returned truth may differ from spec.true_angle_deg by up to
    jitter_deg: the requested angle is nudged away from orientation-bin
    edges so every jittered leaf segment lands in the same bin. Leaf and
    distractor segments sit at least boundary_min_px + 20 from the border
    (always retained); stem segments sit closer than boundary_min_px - 20
    at orientations inside the slope band (always removed). Distractors
    occupy pairwise-distinct bins away from the leaf bin.
    """
    config = config or PipelineConfig()
    rng = random.Random(spec.seed)
    width, height = spec.image_size
    bin_deg = config.orientation_bin_deg

    if spec.jitter_deg >= bin_deg / 2.0:
        raise GenerationError(
            f"jitter_deg {spec.jitter_deg} must stay below half the "
            f"{bin_deg}-degree orientation bin"
        )
    truth = _snap_into_bin(spec.true_angle_deg, spec.jitter_deg, bin_deg)

    interior_lo = float(config.boundary_min_px + PLACEMENT_MARGIN_PX)
    interior_hi_x = float(width - 1) - interior_lo
    interior_hi_y = float(height - 1) - interior_lo
    if spec.n_leaf_segments or spec.n_distractors:
        if interior_hi_x - interior_lo < _LENGTH_RANGE[0] or (
            interior_hi_y - interior_lo < _LENGTH_RANGE[0]
        ):
            raise GenerationError(
                f"{width}x{height} image leaves no interior beyond "
                f"boundary_min_px + {PLACEMENT_MARGIN_PX}"
            )
    stem_border_max = float(config.boundary_min_px - PLACEMENT_MARGIN_PX)
    if spec.n_stem_segments and stem_border_max < 2.0:
        raise GenerationError(
            f"boundary_min_px {config.boundary_min_px} leaves no border strip "
            "for stem segments"
        )

    segments: list[LineSegment] = []

    for _ in range(spec.n_leaf_segments):
        orientation = truth + rng.uniform(-spec.jitter_deg, spec.jitter_deg)
        segments.append(
            _place_segment(
                rng, orientation, interior_lo, interior_hi_x, interior_hi_y,
                score=rng.uniform(0.5, 1.0),
            )
        )

    stem_low = max(config.slope_band_low_deg, config.slope_band_high_deg - 4.0)
    for _ in range(spec.n_stem_segments):
        orientation = rng.uniform(stem_low, config.slope_band_high_deg)
        segments.append(
            _place_stem_segment(
                rng, orientation, width, height, stem_border_max,
                score=rng.uniform(0.5, 1.0),
            )
        )

    leaf_bin = math.floor(truth / bin_deg)
    available_bins = [b for b in range(int(90.0 / bin_deg)) if b != leaf_bin]
    if spec.n_distractors > len(available_bins):
        raise GenerationError(
            f"cannot place {spec.n_distractors} distractors in "
            f"{len(available_bins)} distinct orientation bins"
        )
    for bin_index in rng.sample(available_bins, spec.n_distractors):
        center = (bin_index + 0.5) * bin_deg
        orientation = center + rng.uniform(-0.4, 0.4) * bin_deg
        segments.append(
            _place_segment(
                rng, orientation, interior_lo, interior_hi_x, interior_hi_y,
                score=rng.uniform(0.5, 1.0),
            )
        )

    rng.shuffle(segments)

    full_frame = InstanceDetection(
        score=1.0,
        mask=MaskEncoding(rle=(0, width * height)),
        bbox=(0.0, 0.0, float(width), float(height)),
    )
    record = DetectionRecord(
        image_id=f"synth-{spec.seed:012d}",
        width=width,
        height=height,
        instances=(full_frame,),
        segments=tuple(segments),
        source=(
            f"synthetic fixture seed={spec.seed} "
            f"leaf={spec.n_leaf_segments} stem={spec.n_stem_segments} "
            f"distractors={spec.n_distractors}"
        ),
    )
    return record, truth
