"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command line
front end can map failures onto exit statuses without string matching.
"""


class InversionError(Exception):
    code = "inversion-error"


class DimensionMismatch(InversionError, ValueError):
    code = "dimension-mismatch"


class ZeroConstantTerm(InversionError, ZeroDivisionError):
    code = "zero-constant-term"


class InnerConstantNonzero(InversionError, ValueError):
    code = "inner-constant-nonzero"


class NotNormalized(InversionError, ValueError):
    """V(0) != 0. Re-centre with a shift first."""

    code = "not-normalized"


class SingularDerivative(InversionError, ZeroDivisionError):
    code = "singular-derivative"


class DerivativeVanishesAtPoint(SingularDerivative):
    code = "derivative-vanishes-at-point"


class SingularAtOrigin(InversionError, ZeroDivisionError):
    """The Jacobian at the origin is not invertible."""

    code = "singular-at-origin"


class PointMismatch(InversionError, ValueError):
    code = "point-mismatch"


class OrderExhausted(InversionError, ValueError):
    """A truncated series was asked for terms beyond its order."""

    code = "order-exhausted"


class RouteDisagreement(InversionError, ArithmeticError):
    code = "route-disagreement"


class CapExceeded(InversionError, ArithmeticError):
    """A route would allocate beyond its configured size limit."""

    code = "cap-exceeded"
