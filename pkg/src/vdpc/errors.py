"""Exception hierarchy shared by the library and the CLI.

Each class carries the process exit code the CLI maps it to:
data/ingestion problems exit 2, any pipeline or parameter problem
exits 3.  Usage errors (exit 1) and bench-tolerance failures (exit 4)
are raised by the CLI layer itself.
"""

from __future__ import annotations


class VdpcError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class DataError(VdpcError):
    """Raised when an input file cannot be ingested."""

    exit_code = 2


class ParameterError(VdpcError):
    """Raised when a parameter value is outside its valid domain."""

    exit_code = 3


class StageError(VdpcError):
    """Raised when a pipeline stage cannot proceed; names the stage."""

    exit_code = 3

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
