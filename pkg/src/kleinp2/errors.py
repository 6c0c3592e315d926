"""Exceptions and warnings raised across the package."""


class KleinError(Exception):
    """Base class for package errors."""


class CoincidentPoints(KleinError):
    pass


class CoincidentLines(KleinError):
    pass


class DegenerateQuadruple(KleinError):
    pass


class DegenerateInput(KleinError, ValueError):
    """Zero vector, singular matrix or a degenerate circle."""


class IllConditioned(KleinError):
    pass


class PreconditionViolation(KleinError):
    pass


class BudgetExceeded(KleinError):
    pass


class EmptyDomain(KleinError):
    pass


class NotControllable(KleinError):
    pass


class SpectrumMismatch(KleinError, ValueError):
    pass


class RationalThetaWarning(UserWarning):
    pass


class IllConditionedWarning(UserWarning):
    pass
