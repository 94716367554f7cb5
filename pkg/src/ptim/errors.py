"""Exception types shared across the package."""


class PtimError(Exception):
    """Base class for all errors raised by this package."""


class GraphParseError(PtimError):
    """A graph source could not be parsed (message carries the line number)."""


class ValidationError(PtimError):
    """An argument or data structure violates a documented precondition."""


class DatasetUnavailableError(PtimError):
    """A configured dataset file is missing; never silently skipped."""
