"""Error taxonomy shared across the toolkit.

The CLI maps these onto exit codes: DataError -> 2, BackendError -> 3.
Usage errors (bad flags) are handled by the argument parser and exit 1.
"""
from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ToolkitError):
    """Malformed or inconsistent input data, config, or fixtures."""


class BackendError(ToolkitError):
    """A model backend or remote service failed."""


class TransportError(BackendError):
    """Connection-level failure talking to a backend (retryable)."""


class FormatError(BackendError):
    """A completion could not be parsed into the expected shape.

    Carries the raw completion text so callers can log or inspect it.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class SkipDatapoint(ToolkitError):
    """Signal that a synthesis datapoint failed its quality gates and
    should be dropped rather than emitted."""
