"""Exception types shared across the pipeline.

Kept in one place because the proxy layer maps most of them onto HTTP
status codes and needs to import them all anyway.
"""

from __future__ import annotations


class MorpesError(Exception):
    """Base class for all package-specific errors."""


class FetchError(MorpesError):
    """Network failure or non-success HTTP status while fetching a page."""

    def __init__(self, reason: str, status: int | None = None):
        super().__init__(reason)
        self.reason = reason
        self.status = status


class ContentTypeError(MorpesError):
    """The fetched resource is not an HTML document."""


class EmptyPageError(MorpesError):
    """The page body contains no visible text to segment."""


class InvalidUserError(MorpesError):
    """User id is empty or otherwise unusable."""


class EventMismatchError(MorpesError):
    """Interaction event does not reference the supplied segment."""


class NotFoundError(MorpesError):
    """Requested profile does not exist in the store."""


class StoreError(MorpesError):
    """Profile storage I/O failed."""


class TemplateNotFoundError(MorpesError):
    """Explicitly requested template id is not configured."""


class NoMoreShotsError(MorpesError):
    """The segment buffer is exhausted; no further shots exist."""


class RenderError(MorpesError):
    """A shot references a segment id missing from the segment set."""


class EmptyGroupError(MorpesError):
    """Metrics were requested over an empty collection of records."""
