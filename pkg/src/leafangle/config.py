"""Pipeline thresholds, loaded from defaults, a TOML file, or CLI overrides.

Every numeric threshold used anywhere in the pipeline lives here so the
processing modules stay parameter-pure and the filter/outlier studies can
be re-run with other values.
"""

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError


@dataclass(frozen=True)
class PipelineConfig:
    """Immutable bundle of every tunable threshold.

    Attributes:
        slope_band_low_deg: Lower edge of the stem orientation band (degrees).
        slope_band_high_deg: Upper edge of the stem orientation band (degrees).
        boundary_min_px: Segments closer than this to the image border are
            treated as stem candidates (pixels).
        orientation_bin_deg: Bin width used when taking the mode of segment
            orientations (degrees).
        outlier_threshold_deg: Algorithm-vs-manual differences strictly above
            this are outliers (degrees).
        min_instance_score: Instances scoring below this are dropped.
        sharpness_warn_threshold: ROIs with Laplacian-variance sharpness below
            this get a low_sharpness flag (warning only).
        roi_padding_px: Padding added around the mask bounding box when
            cropping the ROI (pixels).
    """

    slope_band_low_deg: float = 80.0
    slope_band_high_deg: float = 90.0
    boundary_min_px: int = 100
    orientation_bin_deg: float = 1.0
    outlier_threshold_deg: float = 8.0
    min_instance_score: float = 0.5
    sharpness_warn_threshold: float = 100.0
    roi_padding_px: int = 10

    def __post_init__(self):
        if not 0 <= self.slope_band_low_deg:
            raise ConfigError(
                f"slope_band_low_deg must be >= 0, got {self.slope_band_low_deg}",
                key="slope_band_low_deg",
            )
        if not self.slope_band_low_deg < self.slope_band_high_deg:
            raise ConfigError(
                "slope_band_low_deg must be strictly below slope_band_high_deg, "
                f"got {self.slope_band_low_deg} >= {self.slope_band_high_deg}",
                key="slope_band_low_deg",
            )
        if not self.slope_band_high_deg <= 90:
            raise ConfigError(
                f"slope_band_high_deg must be <= 90, got {self.slope_band_high_deg}",
                key="slope_band_high_deg",
            )
        if self.boundary_min_px < 0:
            raise ConfigError(
                f"boundary_min_px must be >= 0, got {self.boundary_min_px}",
                key="boundary_min_px",
            )
        if self.orientation_bin_deg <= 0:
            raise ConfigError(
                f"orientation_bin_deg must be > 0, got {self.orientation_bin_deg}",
                key="orientation_bin_deg",
            )
        if self.outlier_threshold_deg <= 0:
            raise ConfigError(
                f"outlier_threshold_deg must be > 0, got {self.outlier_threshold_deg}",
                key="outlier_threshold_deg",
            )
        if not 0 <= self.min_instance_score <= 1:
            raise ConfigError(
                f"min_instance_score must be in [0, 1], got {self.min_instance_score}",
                key="min_instance_score",
            )
        if self.sharpness_warn_threshold < 0:
            raise ConfigError(
                f"sharpness_warn_threshold must be >= 0, got {self.sharpness_warn_threshold}",
                key="sharpness_warn_threshold",
            )
        if self.roi_padding_px < 0:
            raise ConfigError(
                f"roi_padding_px must be >= 0, got {self.roi_padding_px}",
                key="roi_padding_px",
            )

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {
    "slope_band_low_deg": float,
    "slope_band_high_deg": float,
    "boundary_min_px": int,
    "orientation_bin_deg": float,
    "outlier_threshold_deg": float,
    "min_instance_score": float,
    "sharpness_warn_threshold": float,
    "roi_padding_px": int,
}


def _coerce(key: str, value: Any) -> Any:
    """Coerce a raw config value to the field's type, or fail naming the key."""
    want = _FIELD_TYPES[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}", key=key)
    if want is int:
        if float(value) != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}", key=key)
        return int(value)
    return float(value)


def config_from_mapping(mapping: Mapping[str, Any]) -> PipelineConfig:
    """Build a config from a key-value mapping, rejecting unknown keys.

    Unknown keys are errors rather than warnings: a silent typo in a
    threshold name would invalidate an experiment.
    """
    unknown = sorted(set(mapping) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}", key=unknown[0])
    values = {key: _coerce(key, value) for key, value in mapping.items()}
    return PipelineConfig(**values)


def load_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Load the effective config: defaults, overlaid by a TOML file, then overrides.

    Args:
        path: Optional TOML file of threshold keys. Absent means defaults.
        overrides: Optional mapping applied on top of the file (CLI flags).

    Raises:
        ConfigError: on an unreadable or malformed file, an unknown key, or
            a value that violates the config invariants.
    """
    merged: dict[str, Any] = {}
    if path is not None:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        try:
            document = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        merged.update(document)
    if overrides:
        merged.update(overrides)
    return config_from_mapping(merged)
