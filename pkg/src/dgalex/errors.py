"""Exception types shared across the package."""


class DgalexError(Exception):
    """Base class for all dgalex errors."""


class DataError(DgalexError):
    """Raised for unusable input data: unreadable files, missing columns,
    unmappable labels, empty or single-class corpora."""


class FeatureMismatchError(DgalexError):
    """Raised when a model asks for feature columns a matrix does not have."""


class ModelFormatError(DgalexError):
    """Raised when a model file is corrupt, truncated, or has the wrong
    format tag / version."""


class NoConsensusError(DgalexError):
    """Raised when ensemble feature selection produces an empty feature set
    at the requested vote threshold."""
