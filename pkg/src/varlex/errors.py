"""Exception hierarchy shared by all varlex modules."""


class VarlexError(ValueError):
    """Base class for input errors raised by varlex."""


class DomainEmptyError(VarlexError):
    pass


class SpacingError(VarlexError):
    pass


class DomainMismatchError(VarlexError):
    pass


class ExponentRangeError(VarlexError):
    pass


class HypothesisViolation(VarlexError):
    """An input does not satisfy the hypothesis of the inequality being checked."""


class FamilyMismatchError(VarlexError):
    pass


class ConfigError(VarlexError):
    pass


class ConvergenceError(RuntimeError):
    """Internal numerical failure; should not happen for finite inputs."""
