import numpy as np
import pytest

from leafangle import (
    InstanceDetection,
    MaskEncoding,
    MetricError,
    NoInstanceError,
    PipelineConfig,
    ShapeError,
    apply_mask,
    crop_roi,
    decode_mask,
    encode_rle,
    select_primary_instance,
    sharpness_score,
)

CFG = PipelineConfig()


def rect_instance(x0, y0, w, h, width, height, score=0.9):
    bits = np.zeros((height, width), dtype=bool)
    bits[y0 : y0 + h, x0 : x0 + w] = True
    return InstanceDetection(score=score, mask=encode_rle(bits), bbox=(x0, y0, w, h))


def bits_of(inst, width, height):
    return decode_mask(inst.mask, width, height).bits


# --- select_primary_instance ----------------------------------------------


def test_largest_area_wins():
    big = rect_instance(0, 0, 12, 10, 32, 32)  # 120 px
    small = rect_instance(20, 20, 10, 8, 32, 32)  # 80 px
    chosen = select_primary_instance([small, big], 32, 32, CFG)
    assert chosen.area() == 120
    assert np.array_equal(chosen.bits, bits_of(big, 32, 32))


def test_equal_area_tie_goes_to_first():
    first = rect_instance(0, 0, 10, 10, 32, 32)  # 100 px
    second = rect_instance(20, 20, 10, 10, 32, 32)  # 100 px
    chosen = select_primary_instance([first, second], 32, 32, CFG)
    assert np.array_equal(chosen.bits, bits_of(first, 32, 32))


def test_score_floor_drops_instances():
    weak_big = rect_instance(0, 0, 20, 20, 32, 32, score=0.1)
    strong_small = rect_instance(25, 25, 3, 3, 32, 32, score=0.9)
    chosen = select_primary_instance([weak_big, strong_small], 32, 32, CFG)
    assert chosen.area() == 9


def test_no_surviving_instance_is_an_error():
    weak = rect_instance(0, 0, 5, 5, 32, 32, score=0.2)
    with pytest.raises(NoInstanceError) as excinfo:
        select_primary_instance([weak], 32, 32, CFG, image_id="img-7")
    assert excinfo.value.image_id == "img-7"
    with pytest.raises(NoInstanceError):
        select_primary_instance([], 32, 32, CFG)


def test_random_masks_match_brute_force_area_comparison():
    rng = np.random.default_rng(11)
    for _ in range(20):
        grids = [rng.random((16, 16)) < 0.3 for _ in range(5)]
        instances = [
            InstanceDetection(score=0.9, mask=encode_rle(g), bbox=(0, 0, 16, 16))
            for g in grids
        ]
        # oracle: exhaustive area count with first-wins ties
        areas = [int(g.sum()) for g in grids]
        best = max(range(5), key=lambda i: (areas[i], -i))
        chosen = select_primary_instance(instances, 16, 16, CFG)
        assert np.array_equal(chosen.bits, grids[best])


# --- apply_mask ------------------------------------------------------------


def full_mask(width, height, value):
    bits = np.full((height, width), value, dtype=bool)
    return decode_mask(encode_rle(bits), width, height)


def test_all_ones_mask_is_identity():
    image = np.arange(64, dtype=np.uint8).reshape(8, 8)
    out = apply_mask(image, full_mask(8, 8, True))
    assert np.array_equal(out, image)


def test_all_zeros_mask_annihilates():
    image = np.arange(64, dtype=np.uint8).reshape(8, 8)
    assert not apply_mask(image, full_mask(8, 8, False)).any()


def test_apply_mask_matches_pixelwise_oracle():
    rng = np.random.default_rng(5)
    image = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
    bits = rng.random((16, 16)) < 0.5
    out = apply_mask(image, decode_mask(encode_rle(bits), 16, 16))
    for y in range(16):
        for x in range(16):
            assert out[y, x] == (image[y, x] if bits[y, x] else 0)


def test_apply_mask_color_image():
    rng = np.random.default_rng(6)
    image = rng.integers(0, 256, size=(8, 8, 3), dtype=np.uint8)
    bits = rng.random((8, 8)) < 0.5
    out = apply_mask(image, decode_mask(encode_rle(bits), 8, 8))
    assert np.array_equal(out[bits], image[bits])
    assert not out[~bits].any()


def test_apply_mask_is_idempotent():
    rng = np.random.default_rng(7)
    image = rng.integers(0, 256, size=(12, 12), dtype=np.uint8)
    mask = decode_mask(encode_rle(rng.random((12, 12)) < 0.4), 12, 12)
    once = apply_mask(image, mask)
    assert np.array_equal(apply_mask(once, mask), once)


def test_apply_mask_shape_mismatch():
    image = np.zeros((8, 9), dtype=np.uint8)
    with pytest.raises(ShapeError):
        apply_mask(image, full_mask(8, 8, True))


# --- crop_roi ---------------------------------------------------------------


def test_single_pixel_crop_with_padding():
    image = np.zeros((100, 100), dtype=np.uint8)
    bits = np.zeros((100, 100), dtype=bool)
    bits[50, 50] = True
    roi = crop_roi(image, decode_mask(encode_rle(bits), 100, 100), CFG)
    assert roi.offset == (40, 40)
    assert roi.pixels.shape == (21, 21)  # spans 40..60 inclusive both axes


def test_corner_crop_clips_at_zero():
    image = np.zeros((100, 100), dtype=np.uint8)
    bits = np.zeros((100, 100), dtype=bool)
    bits[0, 0] = True
    roi = crop_roi(image, decode_mask(encode_rle(bits), 100, 100), CFG)
    assert roi.offset == (0, 0)
    assert roi.pixels.shape == (11, 11)


def test_crop_contains_every_set_pixel():
    rng = np.random.default_rng(8)
    for _ in range(10):
        bits = rng.random((60, 80)) < 0.02
        if not bits.any():
            bits[30, 40] = True
        image = rng.integers(0, 256, size=(60, 80), dtype=np.uint8)
        roi = crop_roi(image, decode_mask(encode_rle(bits), 80, 60), CFG)
        x0, y0 = roi.offset
        h, w = roi.pixels.shape[:2]
        ys, xs = np.nonzero(bits)
        assert (ys >= y0).all() and (ys <= y0 + h - 1).all()
        assert (xs >= x0).all() and (xs <= x0 + w - 1).all()


def test_crop_pixels_match_apply_mask_on_set_pixels():
    rng = np.random.default_rng(9)
    bits = rng.random((40, 40)) < 0.1
    bits[20, 20] = True
    image = rng.integers(0, 256, size=(40, 40), dtype=np.uint8)
    mask = decode_mask(encode_rle(bits), 40, 40)
    roi = crop_roi(image, mask, CFG)
    masked = apply_mask(image, mask)
    x0, y0 = roi.offset
    h, w = roi.pixels.shape[:2]
    assert np.array_equal(roi.pixels, masked[y0 : y0 + h, x0 : x0 + w])
    ys, xs = np.nonzero(bits)
    assert np.array_equal(roi.pixels[ys - y0, xs - x0], image[ys, xs])


def test_empty_mask_is_an_error():
    image = np.zeros((20, 20), dtype=np.uint8)
    with pytest.raises(NoInstanceError):
        crop_roi(image, decode_mask(encode_rle(np.zeros((20, 20), bool)), 20, 20), CFG)


# --- sharpness ---------------------------------------------------------------


def test_constant_image_has_zero_sharpness():
    assert sharpness_score(np.full((10, 10), 77, dtype=np.uint8)) == 0.0


def test_single_bright_pixel_is_sharp():
    image = np.zeros((5, 5), dtype=np.uint8)
    image[2, 2] = 255
    # Derived by direct convolution + population variance: 144500.
    assert sharpness_score(image) == pytest.approx(144500.0)
    assert sharpness_score(image) > 0.0


def test_checkerboard_matches_direct_summation():
    image = np.fromfunction(lambda y, x: ((x + y) % 2 == 0) * 255, (8, 8)).astype(
        np.uint8
    )
    # Derived by independent direct summation over interior pixels: 1040400.
    assert sharpness_score(image) == pytest.approx(1040400.0)


def test_sharpness_matches_oracle_on_random_image():
    rng = np.random.default_rng(10)
    image = rng.integers(0, 256, size=(9, 7), dtype=np.uint8)

    def oracle(img):
        vals = []
        for y in range(1, img.shape[0] - 1):
            for x in range(1, img.shape[1] - 1):
                vals.append(
                    float(img[y - 1, x]) + float(img[y + 1, x])
                    + float(img[y, x - 1]) + float(img[y, x + 1])
                    - 4.0 * float(img[y, x])
                )
        mean = sum(vals) / len(vals)
        return sum((v - mean) ** 2 for v in vals) / len(vals)

    assert sharpness_score(image) == pytest.approx(oracle(image), rel=1e-12)


def test_color_image_uses_luminance():
    flat_red = np.zeros((6, 6, 3), dtype=np.uint8)
    flat_red[:, :, 0] = 200
    assert sharpness_score(flat_red) == 0.0


def test_too_small_image_rejected():
    with pytest.raises(MetricError):
        sharpness_score(np.zeros((2, 5), dtype=np.uint8))
