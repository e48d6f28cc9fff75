"""Exception types shared across the library.

Domain violations subclass ``ValueError`` so callers that only know the
standard library still catch them; numerical failures subclass
``RuntimeError`` and carry enough state to diagnose where the method broke.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A series or iteration failed to reach the requested tolerance.

    Attributes
    ----------
    region : str
        Which evaluation region failed (e.g. ``"series"``, ``"asymptotic"``).
    detail : dict
        Free-form diagnostics (argument, term counts, achieved error).
    """

    def __init__(self, message, region="", detail=None):
        super().__init__(message)
        self.region = region
        self.detail = detail or {}


class InvalidPhaseFunctionError(ValueError):
    """Scattering kernel coefficients produce an inadmissible kernel."""


class ConfigurationError(ValueError):
    """Inconsistent solver configuration (e.g. truncation below kernel degree)."""


class EigenSolverError(RuntimeError):
    """Eigendecomposition failed; carries the wavenumber being processed."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class DefectiveOperatorError(RuntimeError):
    """Eigenvalues coalesced; the left/right eigenvector expansion is invalid."""

    def __init__(self, message, k=None, gap=None):
        super().__init__(message)
        self.k = k
        self.gap = gap


class ResolventError(RuntimeError):
    """A shifted operator was (numerically) singular during a resolvent solve."""


class QuadratureError(RuntimeError):
    """Oscillatory quadrature or its accelerator failed to converge.

    Attributes
    ----------
    panels : int
        Number of panels integrated before the failure was declared.
    detail : dict
        Panel-level diagnostics.
    """

    def __init__(self, message, panels=0, detail=None):
        super().__init__(message)
        self.panels = panels
        self.detail = detail or {}


class ScaleError(ValueError):
    """A random-walk time scale is too coarse for the requested rates."""


class DegenerateTransportError(ValueError):
    """Transport coefficients degenerate (anisotropy factor reaching one)."""
