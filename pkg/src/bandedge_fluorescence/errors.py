"""Exception types raised by the library and mapped to CLI exit codes."""


class ParameterError(ValueError):
    """Invalid physical or numerical parameters.

    ``field`` names the offending parameter so front ends can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class ConfigError(ValueError):
    """Malformed run configuration (unknown key, unparsable value)."""


class NumericalError(ArithmeticError):
    """Base class for failures of the linear-response machinery."""


class SingularSteadyState(NumericalError):
    """The DC mean equations have no damping channel."""


class SingularResponse(NumericalError):
    """The linear-response matrix is numerically singular at some frequency."""


class NonConvergence(NumericalError):
    """Adaptive quadrature or long-time integration did not converge."""


class StepSizeTooLarge(NumericalError):
    """Time step does not resolve the atomic dynamics."""
