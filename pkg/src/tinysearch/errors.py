"""Exception hierarchy shared by all tinysearch modules.

The CLI maps these onto exit codes: ValidationError -> 1, transport and
file-format failures -> 2.
"""


class TinySearchError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TinySearchError):
    """Bad input data or configuration (duplicate ids, empty query, ...)."""


class TransportError(TinySearchError):
    """Remote encoder unreachable, timed out, or replied with garbage."""


class DimensionMismatchError(TinySearchError):
    """A vector's length disagrees with the configured dimension."""


class ZeroNormError(TinySearchError):
    """Cosine similarity requested for a zero-length vector."""


class FormatError(TinySearchError):
    """A persisted file does not match its declared format."""


class CacheFormatError(FormatError):
    """Embedding-cache file is malformed; message carries the line number."""


class ModelFormatError(FormatError):
    """Model weight file is malformed or inconsistent with its shapes."""
