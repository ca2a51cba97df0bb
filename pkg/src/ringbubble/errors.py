"""Exception hierarchy shared across the library.

Every module raises subclasses of RingBubbleError so callers can catch
library failures with a single except clause.  Validation failures derive
from ValueError as well, numerical-budget failures from RuntimeError.
"""


class RingBubbleError(Exception):
    """Base class for all library errors."""


class ValidationError(RingBubbleError, ValueError):
    """Base class for parameter/input validation failures."""


class NumericalError(RingBubbleError, RuntimeError):
    """Base class for numerical failures (budget exhausted, bad fits...)."""


# --- model ---------------------------------------------------------------

class DimensionTooSmall(ValidationError):
    pass


class ExponentOutOfRange(ValidationError):
    pass


class NonPhysicalD(ValidationError):
    pass


class ProfileNotPositive(ValidationError):
    pass


# --- bubble --------------------------------------------------------------

class CenterAtOrigin(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NotOnBoundary(ValidationError):
    pass


class DegenerateAxis(ValidationError):
    pass


class CoincidentPoints(ValidationError):
    pass


# --- quad ----------------------------------------------------------------

class ToleranceNotMet(NumericalError):
    pass


class SymmetryMismatch(ValidationError):
    pass


class DivergentIntegral(ValidationError):
    pass


# --- coeffs --------------------------------------------------------------

class FitIllConditioned(NumericalError):
    pass


class InadmissibleRegime(ValidationError):
    pass


class DomainError(ValidationError):
    pass


# --- energy --------------------------------------------------------------

class OutsideBox(ValidationError):
    pass


class EmptyGrid(ValidationError):
    pass


class BudgetExhausted(NumericalError):
    pass


# --- solver --------------------------------------------------------------

class NoInteriorCriticalPoint(NumericalError):
    pass


class NotAdmissible(ValidationError):
    pass
