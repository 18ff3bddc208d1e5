"""Build detection-record documents in the downstream pipeline's schema.

The schema is a fixed wire contract:
{"image_id", "width", "height", "source",
 "instances": [{"score", "bbox": [x, y, w, h], "mask": {"rle": [...]} | {"polygon": [...]}}],
 "segments": [{"x1", "y1", "x2", "y2", "score"}]}
with masks as uncompressed column-major RLE counts (background run first).
"""

import numpy as np


def encode_rle_counts(bits: np.ndarray) -> list[int]:
    """Uncompressed column-major RLE of a (height, width) binary grid."""
    flat = np.asarray(bits, dtype=bool).T.ravel()
    edges = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], edges, [flat.size]))
    counts = np.diff(bounds).astype(int).tolist()
    if flat.size and flat[0]:
        counts.insert(0, 0)
    return counts


def bbox_of(bits: np.ndarray) -> list[float]:
    """Tight [x, y, w, h] box around the set pixels."""
    ys, xs = np.nonzero(bits)
    x0, y0 = int(xs.min()), int(ys.min())
    return [float(x0), float(y0), float(int(xs.max()) - x0 + 1), float(int(ys.max()) - y0 + 1)]


def instance_entry(score: float, bits: np.ndarray) -> dict:
    return {
        "score": round(float(score), 6),
        "bbox": bbox_of(bits),
        "mask": {"rle": encode_rle_counts(bits)},
    }


def segment_entries(
    segments: list[tuple[float, float, float, float, float]],
    width: int,
    height: int,
) -> list[dict]:
    """Clamp raw detector segments into the frame; drop degenerate ones."""
    entries = []
    for x1, y1, x2, y2, score in segments:
        x1 = min(max(x1, 0.0), width - 1.0)
        x2 = min(max(x2, 0.0), width - 1.0)
        y1 = min(max(y1, 0.0), height - 1.0)
        y2 = min(max(y2, 0.0), height - 1.0)
        if x1 == x2 and y1 == y2:
            continue
        entries.append(
            {
                "x1": x1, "y1": y1, "x2": x2, "y2": y2,
                "score": round(min(max(float(score), 0.0), 1.0), 6),
            }
        )
    return entries


def build_record(
    image_id: str,
    width: int,
    height: int,
    source: str,
    instances: list[tuple[float, np.ndarray]],
    segments: list[tuple[float, float, float, float, float]],
) -> dict:
    return {
        "image_id": image_id,
        "width": int(width),
        "height": int(height),
        "source": source,
        "instances": [instance_entry(score, bits) for score, bits in instances],
        "segments": segment_entries(segments, width, height),
    }
