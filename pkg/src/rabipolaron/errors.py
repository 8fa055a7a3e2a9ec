"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """A parameter lies outside the domain of an operation."""


class ConfigurationError(ValueError):
    """Invalid user configuration (grids, sweep files, output locations)."""


class WidenGridError(ConfigurationError):
    """A phase-space grid does not cover the support of the field."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ResourceError(RuntimeError):
    """A resource cap (e.g. Fock truncation) was exceeded."""


class TruncationWarning(UserWarning):
    """A Fock-space truncation leaves non-negligible population outside the basis."""

    def __init__(self, message, tail=float("nan")):
        super().__init__(message)
        self.tail = tail


class ConvergenceWarning(UserWarning):
    """An optimizer stopped without meeting its energy tolerance."""
