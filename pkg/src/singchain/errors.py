"""Exception hierarchy.

Numerical failures (stiffness, instability, loss of positivity, fit failure)
derive from ``NumericalError``; bad inputs derive from ``ParameterError``,
which is also a ``ValueError``.
"""

from __future__ import annotations

from typing import Any


class SingChainError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SingChainError, ValueError):
    """Invalid or inconsistent input parameters."""


class DomainError(ParameterError):
    """A formula was evaluated outside its domain (e.g. negative radicand)."""


class DegeneracyError(ParameterError):
    """Parameters sit on a degenerate set where a formula is undefined."""


class ResonanceError(DegeneracyError):
    """A resonant denominator vanishes."""


class NumericalError(SingChainError):
    """A computation could not be completed numerically.

    ``partial`` carries whatever was computed before the failure (a series
    object, or ``None``).
    """

    def __init__(self, message: str, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


class SingularStateError(NumericalError):
    """The jump amplitude vanished, so the front speed is undefined."""


class StiffnessError(NumericalError):
    """The adaptive step size underflowed."""


class PhysicalityError(NumericalError):
    """The geopotential at the vortex center became non-positive."""


class StabilityError(NumericalError):
    """The Hill equation is unstable for the requested potential."""


class InvalidMonodromyError(NumericalError):
    """Monodromy determinant is far from one."""


class TrackingError(NumericalError):
    """No shock could be located in a profile."""


class FitFailureError(NumericalError):
    """Every optimizer restart failed to evaluate."""
