"""Exception hierarchy for the leaf-angle pipeline.

Every failure the pipeline can report maps to one of these classes so
callers (and the CLI exit-code logic) can dispatch on type instead of
parsing messages.
"""


class PipelineError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(PipelineError):
    """Bad configuration: unparseable file, unknown key, or invalid value."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class SchemaError(PipelineError):
    """A document or table violates the expected schema."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class GeometryError(PipelineError):
    """Geometry out of bounds or degenerate (zero-length segment, bad bbox)."""

    def __init__(self, message: str, image_id: str | None = None, index: int | None = None):
        super().__init__(message)
        self.image_id = image_id
        self.index = index


class DecodeError(PipelineError):
    """Mask encoding cannot be decoded against the target grid."""


class ShapeError(PipelineError):
    """Array or vector dimensions do not line up."""


class MetricError(PipelineError):
    """A metric is undefined for the given input (e.g. zero vector)."""


class NoInstanceError(PipelineError):
    """No instance detection survives the score floor."""

    def __init__(self, image_id: str):
        super().__init__(f"no instance above the score floor for image {image_id!r}")
        self.image_id = image_id


class NoLeafLinesError(PipelineError):
    """Every line segment was filtered out (or none were present)."""

    def __init__(self, image_id: str):
        super().__init__(f"no leaf line segments remain for image {image_id!r}")
        self.image_id = image_id


class JoinError(PipelineError):
    """Two measurement sets share no image ids."""

    def __init__(self, message: str, n_left: int = 0, n_right: int = 0):
        super().__init__(message)
        self.n_left = n_left
        self.n_right = n_right


class GenerationError(PipelineError):
    """A synthetic fixture cannot be placed inside the requested image."""
