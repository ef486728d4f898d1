"""Exception hierarchy shared by all modules."""


class BellmanError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(BellmanError, ValueError):
    """An argument is outside the range an operation supports."""


class DomainError(BellmanError, ValueError):
    """A point lies outside the parabolic strip or outside the block asked for."""


class NumericError(BellmanError, ArithmeticError):
    """A numerical procedure failed to converge or to bracket a root."""


class ConsistencyError(BellmanError, RuntimeError):
    """A computed quantity violates a property it is known to satisfy."""
