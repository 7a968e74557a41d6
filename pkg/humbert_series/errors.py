"""
Exception hierarchy shared by the evaluators, the formal oracle and the CLI.
Each class carries the process exit code the CLI reports for it.
"""


class HumbertError(Exception):
    """Base class for every error raised by humbert_series."""

    exit_code = 2


class InvalidParameter(HumbertError, ValueError):
    """A parameter hits a pole or violates an evaluator's precondition."""


class DomainError(HumbertError, ValueError):
    """An argument lies outside the domain where a representation is defined."""


class CapExceeded(HumbertError, ValueError):
    """A requested truncation degree exceeds the oracle's cost guard."""


class ConfigError(HumbertError, ValueError):
    """A series control, grid spec or command-line value is malformed."""


class NotConverged(HumbertError, ArithmeticError):
    """A series hit its term cap before the stopping rule fired.

    The partial result is kept on ``outcome`` (converged is False).
    """

    exit_code = 3

    def __init__(self, message: str, outcome=None):
        super().__init__(message)
        self.outcome = outcome
