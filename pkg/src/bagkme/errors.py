"""Exception classes shared across the package."""
from __future__ import annotations


class BagkmeError(Exception):
    """Base class for all package errors."""


class ConfigError(BagkmeError):
    """Invalid configuration value or inconsistent flags (usage-class failure)."""


class DataFormatError(BagkmeError):
    """Malformed canonical CSV input.

    ``line`` is the 1-based line number of the offending row, or None when
    the problem is not tied to a single line (e.g. an empty file).
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TrainingError(BagkmeError):
    """First-stage training failure (non-finite loss, singular system)."""


class SolverError(BagkmeError):
    """Second-stage linear solve failed to meet its residual contract."""
