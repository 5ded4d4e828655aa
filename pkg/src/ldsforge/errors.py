"""Exception types shared across the package."""


class LdsError(Exception):
    """Base class for all ldsforge errors."""


class ValidationError(LdsError, ValueError):
    """Bad user input: malformed files, inconsistent dimensions, invalid config."""


class EnumerationCapError(ValidationError):
    """An enumeration would exceed the configured cap on set size."""
