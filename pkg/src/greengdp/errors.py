"""Exceptions and run diagnostics shared by all greengdp modules.

The CLI maps the exceptions onto process exit codes: ``InputError`` -> 1,
``ComputationError`` -> 2, ``FetchError`` and OS-level I/O errors -> 3.
"""

from __future__ import annotations

from dataclasses import dataclass


class GreenGdpError(Exception):
    """Base class for every error raised by this package."""


class InputError(GreenGdpError, ValueError):
    """Bad user-supplied input: files, config, panel contents, shapes."""


class ComputationError(GreenGdpError, ValueError):
    """Numeric domain violation inside an algorithm (e.g. zero-mean column)."""


class FetchError(GreenGdpError):
    """Remote indicator fetch failed.

    ``status`` carries the HTTP status code when the failure was an HTTP
    error, else ``None`` (network failure, malformed payload, empty result).
    """

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class RunWarning:
    """Non-fatal diagnostic surfaced in reports; ``module`` tags the origin."""

    module: str
    message: str

