"""Exception hierarchy.

Two broad families matter to callers: problems with the supplied data
(``InputError``) and problems that arise while computing (``NumericalError``).
The CLI maps them to exit codes 2 and 3 respectively.
"""


class BLKitError(Exception):
    """Base class for all package errors."""


class InputError(BLKitError):
    """The supplied data violates a precondition or schema."""


class NumericalError(BLKitError):
    """A computation failed or left its trust region."""


# -- data validation ---------------------------------------------------------

class DimensionMismatch(InputError):
    pass


class NotSurjective(InputError):
    """A map's smallest singular value is below the rank tolerance."""


class ExponentOutOfRange(InputError):
    pass


class DeltaOutOfRange(InputError):
    """Requested accuracy is outside (0, delta0) for the instance."""


class ExponentsNotYoung(InputError):
    """Reciprocals of the exponent triple do not sum to 2."""


class FactorNotSurjective(InputError):
    """A factor projection restricted to the subspace is rank deficient."""


class RankDeficientParametrization(InputError):
    """A parametrising differential does not have full column rank."""


class SubsetBudgetExceeded(InputError):
    """Too many exponent vectors for exhaustive subset enumeration."""


class ExpansionBudgetExceeded(InputError):
    """binomial(M, n) exceeds the configured expansion budget."""


class QuadratureBudgetExceeded(InputError):
    """Requested rule needs more nodes than the configured budget."""


# -- numerical failures ------------------------------------------------------

class SingularDenominator(NumericalError):
    """The quadratic-form sum in the gaussian ratio is not positive definite."""


class DegenerateLP(NumericalError):
    """Hull membership is numerically ambiguous near the boundary.

    Raised instead of silently deciding, because a wrong interior/boundary
    call corrupts every constant derived downstream.
    """


class NotInterior(NumericalError):
    """Interior minimisation requested for a non-interior subset."""


class NonConvergence(NumericalError):
    """Newton iteration did not meet the gradient tolerance in time."""


class NotFinite(NumericalError):
    """An operation requires a finite constant but the verdict is not."""


class ErrorEstimateTooLarge(NumericalError):
    """Quadrature error estimate exceeds the trust threshold."""
