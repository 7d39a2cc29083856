"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes: configuration
problems exit 1, data problems exit 2 and numerical failures exit 3.
"""


class FiscalShockError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(FiscalShockError, ValueError):
    """Invalid configuration or call arguments."""


class DataError(FiscalShockError, ValueError):
    """Input data violate a precondition (missing values, bad dates, ...)."""


class NumericalError(FiscalShockError, ArithmeticError):
    """A computation could not be carried out reliably."""


class RankDeficientError(NumericalError):
    """Regressor or restriction matrix lacks full rank."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class DegenerateShockError(NumericalError):
    """An identified shock series has (numerically) zero variance."""


class ConvergenceError(NumericalError):
    """An iterative solver stopped before meeting its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PipelineError(FiscalShockError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the reason."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
