"""Exception hierarchy shared by all quadlucas modules."""


class QuadLucasError(Exception):
    """Base class for library errors."""


class DomainError(QuadLucasError, ValueError):
    pass


class BudgetExceeded(QuadLucasError):
    """A factorization budget ran out before every cofactor was split.

    ``lower_bound`` is the largest certified prime found so far (1 if none),
    ``factorization`` the partial result.
    """

    def __init__(self, message, lower_bound=1, factorization=None):
        super().__init__(message)
        self.lower_bound = lower_bound
        self.factorization = factorization


class ReducibleInput(QuadLucasError, ValueError):
    pass


class ZeroElement(QuadLucasError, ValueError):
    pass


class HeightMismatch(QuadLucasError):
    pass


class RootOfUnityAtN(QuadLucasError, ValueError):
    """Phi_n(gamma) vanishes, i.e. gamma is a primitive n-th root of unity."""


class NotAUnit(QuadLucasError, ValueError):
    pass


class DegreeMismatch(QuadLucasError, ValueError):
    pass


class HypothesisNotMet(QuadLucasError):
    pass


class Undecidable(QuadLucasError):
    """Interval comparison not certified before the precision ceiling."""


class ParseError(QuadLucasError, ValueError):
    pass
