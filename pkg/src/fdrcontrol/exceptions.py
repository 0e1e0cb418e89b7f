"""Exception types shared across the package."""


class FdrControlError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FdrControlError, ValueError):
    """A parameter is outside its documented domain."""


class InternalConsistencyError(FdrControlError):
    """Two independent computation paths of the same quantity disagree."""


class UndefinedConditionalRateError(FdrControlError):
    """A conditional rate was requested but its conditioning event never occurred."""
