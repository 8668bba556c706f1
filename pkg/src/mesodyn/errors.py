"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """Inconsistent or numerically unusable configuration (grid, CFL, ...)."""


class UsageError(ValueError):
    """Inputs that cannot be combined, e.g. records on different time grids."""


class IntegrationError(ArithmeticError):
    """A trajectory integration produced a non-finite state.

    ``last_time`` is the last time at which the whole state was finite and
    ``member`` the ensemble index of the offending member, when known.
    """

    def __init__(self, message, last_time, member=None):
        super().__init__(message)
        self.last_time = last_time
        self.member = member

    def __str__(self):
        base = super().__str__()
        where = f"last good t={self.last_time!r}"
        if self.member is not None:
            where = f"member {self.member}, {where}"
        return f"{base} ({where})"


class FitError(ArithmeticError):
    """A least-squares fit could not be performed on the supplied data."""


class DegenerateInputError(ValueError):
    """Input carries no usable information, e.g. every entry masked out."""
