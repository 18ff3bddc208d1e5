"""Synthetic raster plant images for adapter tests: a green stem and an
angled leaf drawn over brown soil noise."""

import math

import numpy as np
from PIL import Image, ImageDraw


def plant_image(seed: int, leaf_angle_deg: float = 35.0, size=(640, 640)) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w, h = size
    soil = np.stack(
        [
            rng.integers(95, 130, (h, w)),
            rng.integers(60, 85, (h, w)),
            rng.integers(35, 55, (h, w)),
        ],
        axis=-1,
    ).astype(np.uint8)
    img = Image.fromarray(soil)
    draw = ImageDraw.Draw(img)
    cx = w // 2 + int(rng.integers(-40, 40))
    junction_y = int(h * 0.55)
    draw.line([(cx, junction_y - 30), (cx, h - 1)], fill=(45, 175, 60), width=12)
    length = 220
    theta = math.radians(leaf_angle_deg)
    tip = (cx + length * math.cos(theta), junction_y - length * math.sin(theta))
    draw.line([(cx, junction_y), tip], fill=(60, 190, 70), width=9)
    return np.asarray(img)


def bare_soil_image(seed: int, size=(320, 320)) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w, h = size
    return np.stack(
        [
            rng.integers(95, 130, (h, w)),
            rng.integers(60, 85, (h, w)),
            rng.integers(35, 55, (h, w)),
        ],
        axis=-1,
    ).astype(np.uint8)
