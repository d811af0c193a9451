"""Exception hierarchy shared by all modules."""


class FormDefectError(Exception):
    """Base class for errors raised by this package."""


class ConductorMismatchError(FormDefectError, ValueError):
    """Operands live in cyclotomic fields of different conductors."""


class CyclotomicZeroDivisionError(FormDefectError, ZeroDivisionError):
    """Inversion or division by the zero element of Q(zeta_d)."""


class SingularFormError(FormDefectError, ValueError):
    """An operation that needs a nonsingular hermitian form got a singular one."""


class NotHermitianError(FormDefectError, ValueError):
    pass


class WittUndecidedError(FormDefectError):
    """Equality of two Witt classes cannot be decided with the available invariants.

    Happens for conductors outside {1, 2, 4} when signature and rank agree but
    the discriminants are not exactly equal.
    """


class AlexanderZeroError(FormDefectError, ValueError):
    """The Alexander polynomial vanishes at a point where it must not."""


class InvalidCharacterError(FormDefectError, ValueError):
    """A character fails to kill a relator, or is not surjective where required."""


class LiftError(FormDefectError, ValueError):
    """A path lift was requested from a vertex that does not lie over the path start."""


class OpenPathError(FormDefectError, ValueError):
    pass


class BudgetExhaustedError(FormDefectError):
    """A bounded search or factorization ran out of budget."""


class SearchExhaustedError(FormDefectError):
    """A bounded character search found no character with the required properties."""
