"""Exception hierarchy shared by the solver modules and the command line."""

from __future__ import annotations


class ScatlabError(Exception):
    """Base class for all library errors."""


class DomainError(ScatlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ScatlabError, ValueError):
    """Invalid configuration or inconsistent solver settings."""


class UnsupportedProfileError(ScatlabError):
    """The potential profile lacks the smoothness an operation needs."""


class IntegrationError(ScatlabError):
    """A quadrature or tail extrapolation did not converge."""


class BranchError(ScatlabError):
    """The phase branch could not be anchored at the top of the grid."""


class ConsistencyError(ScatlabError):
    """Two independent routes to the same quantity disagree."""


class InconclusiveResonanceError(ScatlabError):
    """The zero-energy growth ratio is too close to the resonance threshold."""

    def __init__(self, message: str, ratio: float | None = None):
        super().__init__(message)
        self.ratio = ratio


class TailError(IntegrationError):
    """The high-energy tail does not decay fast enough to be integrated."""


class RangeError(ScatlabError, OverflowError):
    """A special function value overflows double precision."""
