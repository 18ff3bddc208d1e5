"""Inference adapter: runs detection models and emits leafangle detection records."""

__version__ = "0.1.0"

from .coco import convert_annotations
from .config import AdapterConfig
from .errors import AdapterError, ConversionError, StartupError
from .infer import infer_batch, infer_image

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "ConversionError",
    "StartupError",
    "convert_annotations",
    "infer_batch",
    "infer_image",
]
