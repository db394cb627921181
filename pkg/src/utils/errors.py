"""Exception hierarchy shared by every module."""

from typing import Optional


class BGraphError(Exception):
    """Base class for errors raised by the toolkit."""
    pass


class InfeasibleError(BGraphError):
    """Operation needs a feasible instance but got an infeasible one."""

    def __init__(self, message: str, status: Optional[object] = None):
        super().__init__(message)
        self.status = status


class SizeLimitError(BGraphError):
    """An exhaustive oracle was asked to go beyond its configured bound."""
    pass


class UndefinedModelError(BGraphError):
    """A conditional probability was requested in a model with no graphs."""
    pass


class OutOfRangeError(BGraphError, ValueError):
    """A parameter lies outside the hypothesis of a formula."""
    pass


class InvalidSiteError(BGraphError):
    """A switching site does not apply to the given pairing."""
    pass


class InsufficientDataError(BGraphError):
    """Rejection sampling hit the requested class too rarely."""
    pass
