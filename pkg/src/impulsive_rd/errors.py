"""Exception types shared across the package.

Validation problems derive from ``ValueError`` and numerical failures from
``RuntimeError`` so the CLI can map them onto distinct exit codes.
"""


class ParameterError(ValueError):
    """A parameter lies outside its admissible range."""


class DomainError(ParameterError):
    """An argument lies outside the mathematical domain of a function."""


class ResolutionError(ParameterError):
    """A grid is too coarse for the requested domain."""


class UnsupportedError(ParameterError):
    """The requested combination has no implemented evaluation."""


class NumericError(RuntimeError):
    """An iterative or time-stepping computation failed."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class SingularIntegrandError(NumericError):
    """The reaction term vanishes inside an integration interval."""


class DivergenceError(NumericError):
    """A trajectory left the representable range."""
