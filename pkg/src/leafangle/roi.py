"""Region-of-interest extraction: instance selection, masking, cropping, sharpness."""

from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import MetricError, NoInstanceError, ShapeError
from .records import InstanceDetection, InstanceMask, decode_mask

# Rec. 601 luminance weights, fixed for reproducibility.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class RoiImage:
    """A cropped region of interest.

    `pixels` is the masked source image restricted to the crop window;
    `offset` is the crop origin (x, y) in the source image; `sharpness` is
    the Laplacian-variance score of the crop.
    """

    pixels: np.ndarray
    offset: tuple[int, int]
    sharpness: float


def select_primary_instance(
    instances: list[InstanceDetection] | tuple[InstanceDetection, ...],
    width: int,
    height: int,
    config: PipelineConfig,
    image_id: str = "<unknown>",
) -> InstanceMask:
    """Pick the leaf-stem instance: largest decoded mask area above the score floor.

    Ties on area go to the lowest list index.
    """
    best_mask: InstanceMask | None = None
    best_area = -1
    for inst in instances:
        if inst.score < config.min_instance_score:
            continue
        mask = decode_mask(inst.mask, width, height)
        area = mask.area()
        if area > best_area:
            best_mask = mask
            best_area = area
    if best_mask is None:
        raise NoInstanceError(image_id)
    return best_mask


def apply_mask(image: np.ndarray, mask: InstanceMask) -> np.ndarray:
    """Keep image pixels where the mask bit is set, zero elsewhere. Exact."""
    image = np.asarray(image)
    if image.shape[:2] != (mask.height, mask.width):
        raise ShapeError(
            f"image shape {image.shape[:2]} does not match mask "
            f"{(mask.height, mask.width)}"
        )
    bits = mask.bits if image.ndim == 2 else mask.bits[:, :, None]
    return np.where(bits, image, np.zeros_like(image))


def crop_roi(image: np.ndarray, mask: InstanceMask, config: PipelineConfig) -> RoiImage:
    """Crop the masked image to the mask's padded bounding box.

    The crop window is the tight bounding box of set pixels expanded by
    roi_padding_px on every side and clipped to the image bounds. Pixels
    outside the mask are zeroed. Sharpness is computed on the crop.
    """
    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    if rows.size == 0:
        raise NoInstanceError("<empty mask>")
    pad = config.roi_padding_px
    y0 = max(int(rows[0]) - pad, 0)
    y1 = min(int(rows[-1]) + pad, mask.height - 1)
    x0 = max(int(cols[0]) - pad, 0)
    x1 = min(int(cols[-1]) + pad, mask.width - 1)
    masked = apply_mask(image, mask)
    pixels = masked[y0 : y1 + 1, x0 : x1 + 1]
    return RoiImage(pixels=pixels, offset=(x0, y0), sharpness=sharpness_score(pixels))


def sharpness_score(image: np.ndarray) -> float:
    """Variance of the 3x3 Laplacian response over interior pixels.

    Color images are converted to luminance (0.299 R + 0.587 G + 0.114 B)
    first. Interior means pixels where the 3x3 kernel fully fits, so images
    smaller than 3x3 have no score. Constant images score exactly 0.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim == 3:
        image = image @ _LUMA_WEIGHTS
    if image.ndim != 2 or image.shape[0] < 3 or image.shape[1] < 3:
        raise MetricError(
            f"sharpness needs a grid of at least 3x3 pixels, got shape {image.shape}"
        )
    response = (
        image[:-2, 1:-1] + image[2:, 1:-1] + image[1:-1, :-2] + image[1:-1, 2:]
        - 4.0 * image[1:-1, 1:-1]
    )
    return float(response.var())
