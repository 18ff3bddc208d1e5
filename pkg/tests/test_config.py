import pytest

from leafangle import ConfigError, PipelineConfig, load_config
from leafangle.config import config_from_mapping


def test_defaults():
    cfg = load_config(None)
    assert cfg.slope_band_low_deg == 80.0
    assert cfg.slope_band_high_deg == 90.0
    assert cfg.boundary_min_px == 100
    assert cfg.orientation_bin_deg == 1.0
    assert cfg.outlier_threshold_deg == 8.0
    assert cfg.min_instance_score == 0.5
    assert cfg.sharpness_warn_threshold == 100.0
    assert cfg.roi_padding_px == 10


def test_file_overlays_defaults(tmp_path):
    path = tmp_path / "thresholds.toml"
    path.write_text("boundary_min_px = 50\n")
    cfg = load_config(path)
    assert cfg.boundary_min_px == 50
    assert cfg.slope_band_low_deg == 80.0  # untouched keys stay at defaults


def test_overrides_beat_file(tmp_path):
    path = tmp_path / "thresholds.toml"
    path.write_text("boundary_min_px = 50\noutlier_threshold_deg = 5.0\n")
    cfg = load_config(path, overrides={"boundary_min_px": 75})
    assert cfg.boundary_min_px == 75
    assert cfg.outlier_threshold_deg == 5.0


def test_slope_band_low_above_90_rejected():
    with pytest.raises(ConfigError) as excinfo:
        config_from_mapping({"slope_band_low_deg": 95})
    assert "slope_band_low_deg" in str(excinfo.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as excinfo:
        config_from_mapping({"boundry_min_px": 50})
    assert excinfo.value.key == "boundry_min_px"


def test_malformed_file_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("boundary_min_px = = 50\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


@pytest.mark.parametrize(
    "key,value",
    [
        ("slope_band_low_deg", -1),
        ("slope_band_low_deg", 90),  # must stay strictly below the high edge
        ("slope_band_high_deg", 95),
        ("boundary_min_px", -5),
        ("orientation_bin_deg", 0),
        ("outlier_threshold_deg", 0),
        ("min_instance_score", 1.5),
        ("min_instance_score", -0.1),
        ("sharpness_warn_threshold", -1),
        ("roi_padding_px", -1),
    ],
)
def test_invariant_violations_name_the_key(key, value):
    with pytest.raises(ConfigError) as excinfo:
        config_from_mapping({key: value})
    assert excinfo.value.key == key
    assert key in str(excinfo.value)


@pytest.mark.parametrize("key,value", [("boundary_min_px", 50.5), ("boundary_min_px", "50")])
def test_bad_types_rejected(key, value):
    with pytest.raises(ConfigError):
        config_from_mapping({key: value})


def test_integral_float_accepted_for_int_key():
    assert config_from_mapping({"boundary_min_px": 50.0}).boundary_min_px == 50


def test_deterministic():
    assert config_from_mapping({"boundary_min_px": 42}) == config_from_mapping(
        {"boundary_min_px": 42}
    )


def test_config_is_immutable():
    cfg = PipelineConfig()
    with pytest.raises(Exception):
        cfg.boundary_min_px = 7


def test_to_dict_covers_every_field():
    cfg = PipelineConfig()
    snapshot = cfg.to_dict()
    assert PipelineConfig(**snapshot) == cfg
    assert len(snapshot) == 8
