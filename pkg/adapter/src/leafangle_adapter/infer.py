"""Run the models over an image directory and emit detection-record documents."""

import logging
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image

from .backends import load_models
from .config import AdapterConfig
from .emit import build_record

log = logging.getLogger("leafangle_adapter")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}


def _padded_bbox(bits: np.ndarray, padding: int) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(bits)
    height, width = bits.shape
    x0 = max(int(xs.min()) - padding, 0)
    y0 = max(int(ys.min()) - padding, 0)
    x1 = min(int(xs.max()) + padding, width - 1)
    y1 = min(int(ys.max()) + padding, height - 1)
    return x0, y0, x1, y1


def infer_image(
    image_id: str,
    image: np.ndarray,
    mask_model,
    line_model,
    config: AdapterConfig,
) -> dict:
    """Produce one schema document for an RGB image array.

    With run_lines_on_roi and at least one detected instance, the line model
    sees the padded crop around the largest mask and the whole record (crop
    dimensions, cropped masks, crop-frame segments) is emitted in that frame,
    with the offset recorded in `source`.
    """
    height, width = image.shape[:2]
    detections = [
        (score, bits)
        for score, bits in mask_model.predict(image)
        if score >= config.score_floor and bits.any()
    ]
    base_source = f"leafangle-adapter({config.describe()})"

    if config.run_lines_on_roi and detections:
        largest = max(range(len(detections)), key=lambda i: int(detections[i][1].sum()))
        x0, y0, x1, y1 = _padded_bbox(detections[largest][1], config.roi_padding_px)
        crop = image[y0 : y1 + 1, x0 : x1 + 1]
        crop_h, crop_w = crop.shape[:2]
        cropped_instances = []
        for score, bits in detections:
            cropped = bits[y0 : y1 + 1, x0 : x1 + 1]
            if cropped.any():
                cropped_instances.append((score, cropped))
        raw_segments = [
            s for s in line_model.predict(crop) if s[4] >= config.score_floor
        ]
        source = f"{base_source} frame=roi offset=({x0},{y0}) full=({width},{height})"
        return build_record(image_id, crop_w, crop_h, source, cropped_instances, raw_segments)

    raw_segments = [s for s in line_model.predict(image) if s[4] >= config.score_floor]
    source = f"{base_source} frame=full"
    return build_record(image_id, width, height, source, detections, raw_segments)


def iter_image_files(image_dir: str | Path) -> list[Path]:
    image_dir = Path(image_dir)
    return sorted(
        p for p in image_dir.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def infer_batch(image_dir: str | Path, config: AdapterConfig) -> Iterator[tuple[str, dict]]:
    """Yield (image_id, document) for every readable image in the directory.

    Model loading problems raise StartupError immediately; a failure on one
    image is logged and skipped so the batch keeps going.
    """
    mask_model, line_model = load_models(config)
    for path in iter_image_files(image_dir):
        image_id = path.stem
        try:
            image = np.asarray(Image.open(path).convert("RGB"))
            yield image_id, infer_image(image_id, image, mask_model, line_model, config)
        except Exception:
            log.exception("inference failed for %s; skipping", path.name)
            continue
