"""Exception types shared across the package."""


class LzspecError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LzspecError, ValueError):
    """Invalid parameter, configuration or input data."""


class AnticrossingNotCrossedError(ValidationError):
    """The pulse never sweeps through the referenced anticrossing."""


class RegimeError(ValidationError):
    """An approximation was requested outside its validity regime."""


class SchemaError(ValidationError):
    """A data file does not match the expected schema."""


class FitError(LzspecError, ValueError):
    """A fit did not produce a consistent result."""


class IntegrationError(LzspecError, RuntimeError):
    """Time integration failed.

    Attributes
    ----------
    t_reached : float or None
        Time (ns) reached before the failure.
    cell : tuple or None
        (phi_f, tau) coordinates of the failing sweep cell, if any.
    """

    def __init__(self, message, t_reached=None, cell=None):
        super().__init__(message)
        self.t_reached = t_reached
        self.cell = cell
