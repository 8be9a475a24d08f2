"""Exception types shared across the package."""


class MbvpError(Exception):
    """Base class for all errors raised by mbvp."""


class DomainError(MbvpError):
    """A velocity argument reached or crossed the unit-ball boundary."""


class InvalidParamsError(MbvpError):
    """Boundary operator parameters failed their construction checks."""


class UnsupportedBoundaryError(MbvpError):
    """The requested operation is not defined for this boundary domain."""


class NegativeEntryError(MbvpError):
    """A matrix expected to be entrywise nonnegative has a negative entry."""


class NotConvergentError(MbvpError):
    """The matrix is not convergent to zero, so the inverse bound is undefined."""


class NewtonDivergenceError(MbvpError):
    """Damped Newton failed to reduce the residual below tolerance."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class NoConvergenceError(MbvpError):
    """Every solver strategy was exhausted without meeting the tolerance."""

    def __init__(self, message, best_residual=None, best_state=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_state = best_state


class NotCoerciveError(MbvpError):
    """No (sigma, rho) pair certified the negative-tail inequality on samples."""


class ExpressionEvalError(MbvpError):
    """Expression evaluation produced a non-finite value or hit an unknown name."""


# Alias used by callers that talk about evaluation rather than expressions.
EvalError = ExpressionEvalError


class ParseError(MbvpError):
    """Expression text could not be parsed."""

    def __init__(self, offset, expected, found=None):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        self.found = found
        what = found if found is not None else "end of input"
        super().__init__(
            "parse error at offset %d: found %s, expected one of %s"
            % (offset, what, ", ".join(self.expected))
        )


class ConfigError(MbvpError):
    """Problem configuration file is missing keys or has bad values."""
