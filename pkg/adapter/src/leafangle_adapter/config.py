"""Adapter configuration."""

from dataclasses import dataclass
from pathlib import Path

from .errors import AdapterError


@dataclass(frozen=True)
class AdapterConfig:
    """How to run inference and emit detection records.

    Checkpoint paths select the model backends: a path means "load this
    TorchScript export", None means "use the built-in classical-CV reference
    backend". The score floor applies to everything the adapter emits,
    instances and segments alike. With run_lines_on_roi the line model sees
    the padded crop around the largest instance and the whole record is
    emitted in that crop's coordinate frame (declared in the record's
    `source` field); otherwise everything stays in the full-image frame.
    """

    mask_checkpoint: Path | None = None
    line_checkpoint: Path | None = None
    device: str = "cpu"
    score_floor: float = 0.5
    run_lines_on_roi: bool = True
    roi_padding_px: int = 10
    min_component_px: int = 200

    def __post_init__(self):
        if not 0.0 <= self.score_floor <= 1.0:
            raise AdapterError(f"score_floor must be in [0, 1], got {self.score_floor}")
        if self.roi_padding_px < 0:
            raise AdapterError(f"roi_padding_px must be >= 0, got {self.roi_padding_px}")
        if self.min_component_px < 1:
            raise AdapterError(f"min_component_px must be >= 1, got {self.min_component_px}")
        for name in ("mask_checkpoint", "line_checkpoint"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
                if not Path(value).is_file():
                    raise AdapterError(f"{name} {value} does not exist")

    def describe(self) -> str:
        mask = self.mask_checkpoint.name if self.mask_checkpoint else "reference"
        line = self.line_checkpoint.name if self.line_checkpoint else "reference"
        frame = "roi" if self.run_lines_on_roi else "full"
        return (
            f"mask={mask} lines={line} device={self.device} "
            f"score_floor={self.score_floor} frame={frame}"
        )
