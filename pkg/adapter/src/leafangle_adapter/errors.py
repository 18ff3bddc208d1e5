"""Adapter error types."""


class AdapterError(Exception):
    """Base class for adapter failures."""


class StartupError(AdapterError):
    """A configured model checkpoint cannot be loaded."""


class ConversionError(AdapterError):
    """An annotation file cannot be converted to detection records."""
