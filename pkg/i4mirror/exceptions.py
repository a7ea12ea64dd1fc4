"""Exceptions raised by the i4mirror package."""

from __future__ import annotations

__all__ = [
    "ClassNotComputedError",
    "ConfigError",
    "DomainPointError",
    "EffectivityError",
    "I4MirrorError",
    "InvariantViolation",
    "LatticeMismatchError",
    "SeriesDomainError",
    "TruncationError",
]


class I4MirrorError(Exception):
    """Base class for all errors raised by i4mirror."""


class LatticeMismatchError(I4MirrorError, ValueError):
    """Two series defined over different exponent lattices were combined."""


class SeriesDomainError(I4MirrorError, ValueError):
    """A series operation was applied outside of its domain.

    For example the exponential of a series with a nonzero constant term or
    the inverse of a series that is not a unit.
    """


class DomainPointError(I4MirrorError, ValueError):
    """A function was evaluated at a point outside of its domain."""


class TruncationError(I4MirrorError, ValueError):
    """The requested truncation order is not admissible."""


class EffectivityError(I4MirrorError):
    """A monomial exponent that must be effective has a negative component."""


class ClassNotComputedError(I4MirrorError, KeyError):
    """The requested curve class lies outside of the computed table."""


class ConfigError(I4MirrorError, ValueError):
    """Invalid configuration value."""


class InvariantViolation(I4MirrorError):
    """An internal consistency check failed.

    The name of the violated invariant is kept in the ``invariant`` attribute
    so that the command line interface can report it.
    """

    def __init__(self, invariant: str, message: str = ""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}" if message else invariant)
