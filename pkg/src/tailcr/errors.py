"""Exception hierarchy shared by all estimators and solvers."""


class TailcrError(ValueError):
    """Base class for every error raised by tailcr."""


class DomainError(TailcrError):
    """An argument lies outside the domain of a formula."""


class InvalidInputError(TailcrError):
    """Data or configuration violates a precondition."""


class EstimationError(TailcrError):
    """An estimator is undefined for the given data (e.g. all log-spacings zero)."""


class NoRootError(TailcrError):
    """A bracketed root search found no sign change.

    Attributes:
        diagnostics: bracket endpoints and function values at failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class InfeasibleTargetError(TailcrError):
    """The tilting target lies outside the tiltable range (Z_k, Z_1)."""


class UnboundedRegionError(TailcrError):
    """The statistic never exceeded the critical value while widening a region."""


class CsvParseError(TailcrError):
    """A CSV input could not be parsed under the active policy."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
