from __future__ import annotations

from typing import Any, Mapping, Optional


class SdlabError(Exception):
    """Base class for library errors."""


class GeometryInputError(SdlabError, ValueError):
    """Invalid arguments: dimension mismatch, out-of-range parameters."""


class DegenerateSimplexError(SdlabError, ValueError):
    def __init__(self, message: str, rcond: float) -> None:
        super().__init__(f"{message} (rcond={rcond:.3e})")
        self.rcond = rcond


class ContainmentError(SdlabError, ValueError):
    """A point is not in the convex hull it was claimed to be in."""

    def __init__(self, message: str, margin: float) -> None:
        super().__init__(f"{message} (margin={margin:.3e})")
        self.margin = margin


class VerificationError(SdlabError, AssertionError):
    """An invariant failed; `instance` replays the failure through the API."""

    def __init__(
        self,
        message: str,
        instance: Optional[Mapping[str, Any]] = None,
    ) -> None:
        super().__init__(message)
        self.instance = dict(instance or {})
