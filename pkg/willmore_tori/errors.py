"""Exceptions raised by the willmore_tori package."""

from typing import Any, Mapping


class WillmoreToriError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WillmoreToriError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class DivergenceError(DomainError):
    """The requested quantity is infinite at the given argument (F at k = 1)."""


class GridTooSmallError(WillmoreToriError, ValueError):
    """A grid has too few nodes for the stencils applied to it."""


class DiracResidualError(WillmoreToriError):
    """A spinor field does not solve the Dirac system to the configured tolerance."""


class DegenerateImmersionError(WillmoreToriError):
    """The conformal factor vanishes somewhere on the grid."""


class ChartError(WillmoreToriError):
    """psi2 vanishes on the grid, so the Kenmotsu data is undefined there."""


class BlowUpError(WillmoreToriError):
    """A spinor trajectory grew beyond the blow-up guard."""


class NonPeriodicTrajectoryError(WillmoreToriError):
    """A spinor trajectory does not close, so no torus or mesh can be built from it."""


class NonExactDerivativeError(WillmoreToriError):
    """The operand of a periodic antiderivative has nonzero mean."""


class InstabilityError(WillmoreToriError):
    """A time integration left its stability region."""

    def __init__(self, message: str, diagnostics: Mapping[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoOscillationError(WillmoreToriError):
    """The stationary quartic has no interval where it is positive."""


class TurningPointDegenerateError(WillmoreToriError):
    """A turning point of the stationary quartic is a multiple root."""


class BranchError(WillmoreToriError):
    """The operation needs a sign-definite potential."""
