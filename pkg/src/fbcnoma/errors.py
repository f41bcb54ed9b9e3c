"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`FbcNomaError` so callers can
catch library failures without swallowing programming errors.
"""

from __future__ import annotations

__all__ = [
    "FbcNomaError",
    "DomainError",
    "BracketError",
    "NonConvergenceError",
    "InfeasibleError",
    "CapExceededError",
    "InstabilityError",
    "InsufficientEventsError",
    "ScenarioError",
    "SeriesDivergenceWarning",
    "BoundaryWarning",
]


class FbcNomaError(Exception):
    """Base class for all deliberate failures in this package."""


class DomainError(FbcNomaError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(FbcNomaError):
    """A root bracket does not actually bracket a sign change."""


class NonConvergenceError(FbcNomaError):
    """An iterative routine exhausted its budget without meeting tolerance.

    Carries the iterate history when the caller may want to diagnose
    oscillation vs. divergence.
    """

    def __init__(self, message: str, iterates: list[float] | None = None):
        super().__init__(message)
        self.iterates = list(iterates) if iterates is not None else []


class InfeasibleError(FbcNomaError):
    """No solution exists within the searched region (e.g. constraint cannot bind)."""


class CapExceededError(FbcNomaError, ValueError):
    """A requested operating point violates a hard power cap."""


class InstabilityError(FbcNomaError):
    """Queue drift is non-negative; the tail exponent does not exist."""


class InsufficientEventsError(FbcNomaError):
    """Too few tail exceedances to fit a slope with any statistical meaning."""


class ScenarioError(FbcNomaError, ValueError):
    """A scenario file is malformed: unknown key, missing section, bad value."""


class SeriesDivergenceWarning(UserWarning):
    """An asymptotic series stopped improving before the requested term count."""


class BoundaryWarning(UserWarning):
    """An optimizer returned a point pinned at the search boundary."""
