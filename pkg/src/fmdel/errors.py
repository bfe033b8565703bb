"""Exception types shared across the package.

Each carries the CLI exit code it maps to, so command handlers can translate
failures without a lookup table.
"""


class FmdelError(Exception):
    exit_code = 1


class ParseError(FmdelError):
    exit_code = 2


class ValidationError(FmdelError):
    exit_code = 3


class BudgetError(FmdelError):
    """A configured size or enumeration cap would be exceeded."""

    exit_code = 4

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class CanonicalizationTooLarge(BudgetError):
    pass


class StateGuardTripped(BudgetError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


class MismatchError(FmdelError):
    exit_code = 5


class IncompatibleBoundaries(ValueError):
    pass


class DigestCollision(FmdelError):
    pass
