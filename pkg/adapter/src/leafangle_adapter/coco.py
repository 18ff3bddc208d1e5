"""Convert COCO-format annotation files into detection-record documents.

Ground-truth masks become instances with score 1.0 and no line segments, so
the downstream pipeline's mask path (instance selection, ROI extraction) can
be exercised on hand-annotated data.
"""

import json
from pathlib import Path

from .errors import ConversionError

# COCO boxes occasionally overshoot the image by a fraction of a pixel.
BBOX_CLIP_TOLERANCE_PX = 1.0


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ConversionError(f"{context} is missing {key!r}")
    return obj[key]


def _convert_mask(ann: dict, image: dict, context: str) -> dict:
    segmentation = _require(ann, "segmentation", context)
    if isinstance(segmentation, dict):
        counts = _require(segmentation, "counts", context)
        if isinstance(counts, (str, bytes)):
            raise ConversionError(f"{context}: compressed RLE is not supported")
        size = segmentation.get("size")
        if size != [image["height"], image["width"]]:
            raise ConversionError(
                f"{context}: RLE size {size} does not match image "
                f"{[image['height'], image['width']]}"
            )
        counts = [int(c) for c in counts]
        if sum(counts) != image["width"] * image["height"]:
            raise ConversionError(f"{context}: RLE counts do not cover the image")
        return {"rle": counts}
    if isinstance(segmentation, list):
        if len(segmentation) != 1:
            raise ConversionError(
                f"{context}: expected a single polygon part, got {len(segmentation)}"
            )
        flat = segmentation[0]
        if len(flat) < 6 or len(flat) % 2 != 0:
            raise ConversionError(f"{context}: polygon needs >= 3 (x, y) pairs")
        return {"polygon": [[float(flat[i]), float(flat[i + 1])] for i in range(0, len(flat), 2)]}
    raise ConversionError(f"{context}: unsupported segmentation form")


def _convert_bbox(ann: dict, image: dict, context: str) -> list[float]:
    bbox = _require(ann, "bbox", context)
    if len(bbox) != 4:
        raise ConversionError(f"{context}: bbox must be [x, y, w, h]")
    x, y, w, h = (float(v) for v in bbox)
    width, height = image["width"], image["height"]
    if (
        x < -BBOX_CLIP_TOLERANCE_PX
        or y < -BBOX_CLIP_TOLERANCE_PX
        or x + w > width + BBOX_CLIP_TOLERANCE_PX
        or y + h > height + BBOX_CLIP_TOLERANCE_PX
    ):
        raise ConversionError(f"{context}: bbox {bbox} is outside the {width}x{height} image")
    x = max(x, 0.0)
    y = max(y, 0.0)
    w = min(w, width - x)
    h = min(h, height - y)
    return [x, y, w, h]


def convert_annotations(path: str | Path) -> list[tuple[str, dict]]:
    """Convert one COCO annotation file to (image_id, document) pairs.

    Every listed image yields a record (empty instances when unannotated);
    image_ids are the image file-name stems so records line up with the
    image files on disk.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConversionError(f"cannot read annotation file {path}: {exc}") from exc

    images: dict = {}
    stems: set[str] = set()
    for image in data.get("images", []):
        context = f"image entry {image.get('id')!r}"
        for key in ("id", "file_name", "width", "height"):
            _require(image, key, context)
        stem = Path(image["file_name"]).stem
        if stem in stems:
            raise ConversionError(f"{context}: duplicate file-name stem {stem!r}")
        stems.add(stem)
        images[image["id"]] = image

    instances_by_image: dict = {image_id: [] for image_id in images}
    for ann in data.get("annotations", []):
        context = f"annotation {ann.get('id')!r}"
        image_ref = _require(ann, "image_id", context)
        if image_ref not in images:
            raise ConversionError(f"{context}: references unknown image {image_ref!r}")
        image = images[image_ref]
        instances_by_image[image_ref].append(
            {
                "score": 1.0,
                "bbox": _convert_bbox(ann, image, context),
                "mask": _convert_mask(ann, image, context),
            }
        )

    documents = []
    for image in sorted(images.values(), key=lambda im: Path(im["file_name"]).stem):
        stem = Path(image["file_name"]).stem
        documents.append(
            (
                stem,
                {
                    "image_id": stem,
                    "width": int(image["width"]),
                    "height": int(image["height"]),
                    "source": f"coco:{path.name}",
                    "instances": instances_by_image[image["id"]],
                    "segments": [],
                },
            )
        )
    return documents
