"""Certified real arithmetic on top of ``mpmath.iv``.

A :class:`RealApprox` is a closed interval guaranteed to contain the true
value.  Comparisons against transcendental quantities go through
:func:`certify`, which recomputes at doubled precision until the verdict is
certified or ``PRECISION_CEILING`` bits are reached.

mpmath keeps its working precision in global state; everything here assumes
one thread per process (``--jobs`` uses processes).
"""

from __future__ import annotations

import math
import operator
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import iv

from .errors import DomainError, Undecidable

DEFAULT_PRECISION = 128
PRECISION_CEILING = 4096

iv.prec = DEFAULT_PRECISION


@contextmanager
def precision(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _to_iv(x):
    if isinstance(x, RealApprox):
        return x.iv
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / iv.mpf(x.denominator)
    if isinstance(x, int):
        return iv.mpf(x)
    if isinstance(x, float):
        return iv.mpf(x)
    if isinstance(x, str):
        return iv.mpf(x)
    return iv.mpf(x)


@dataclass(frozen=True)
class RealApprox:
    """Interval ``[lo, hi]`` containing a real number."""

    iv: object

    @classmethod
    def of(cls, x) -> "RealApprox":
        if isinstance(x, RealApprox):
            return x
        return cls(_to_iv(x))

    @classmethod
    def hull(cls, lo, hi) -> "RealApprox":
        lo_iv, hi_iv = _to_iv(lo), _to_iv(hi)
        return cls(iv.mpf([lo_iv.a, hi_iv.b]))

    @property
    def lo(self):
        return mpmath.mp.make_mpf(self.iv._mpi_[0])

    @property
    def hi(self):
        return mpmath.mp.make_mpf(self.iv._mpi_[1])

    @property
    def value(self) -> float:
        """Midpoint as a float."""
        return float((self.lo + self.hi) / 2)

    @property
    def err(self) -> float:
        """Half-width, rounded up to a float."""
        half = (self.hi - self.lo) / 2
        f = float(half)
        return f if f >= half else math.nextafter(f, math.inf)

    @property
    def width(self) -> float:
        return float(self.hi - self.lo)

    def contains(self, x) -> bool:
        other = _to_iv(x)
        return self.iv.a <= other.a and other.b <= self.iv.b

    def overlaps(self, other) -> bool:
        o = _to_iv(other)
        return not (self.iv.b < o.a or o.b < self.iv.a)

    def widen(self, eps) -> "RealApprox":
        e = _to_iv(eps)
        return RealApprox(iv.mpf([(self.iv - e).a, (self.iv + e).b]))

    def __add__(self, other):
        return RealApprox(self.iv + _to_iv(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RealApprox(self.iv - _to_iv(other))

    def __rsub__(self, other):
        return RealApprox(_to_iv(other) - self.iv)

    def __mul__(self, other):
        return RealApprox(self.iv * _to_iv(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RealApprox(self.iv / _to_iv(other))

    def __rtruediv__(self, other):
        return RealApprox(_to_iv(other) / self.iv)

    def __neg__(self):
        return RealApprox(-self.iv)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise TypeError("only non-negative integer powers")
        out = iv.mpf(1)
        for _ in range(k):
            out = out * self.iv
        return RealApprox(out)

    def __abs__(self):
        return RealApprox(abs(self.iv))

    # certified relations: True / False when decided, None when the intervals overlap
    def lt(self, other):
        return _decide(self.iv, _to_iv(other), "<")

    def le(self, other):
        return _decide(self.iv, _to_iv(other), "<=")

    def gt(self, other):
        return _decide(self.iv, _to_iv(other), ">")

    def ge(self, other):
        return _decide(self.iv, _to_iv(other), ">=")

    def __reduce__(self):
        # mpmath.iv values do not pickle; endpoints as exact (sign, man, exp, bc) tuples do
        return (_from_endpoints, (self.lo._mpf_, self.hi._mpf_))

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"RealApprox({mpmath.nstr(self.lo, 17)}, {mpmath.nstr(self.hi, 17)})"

    def render(self, digits: int = 15) -> str:
        return mpmath.nstr((self.lo + self.hi) / 2, digits)


def _from_endpoints(lo, hi) -> RealApprox:
    return RealApprox(iv.mpf([mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)]))


def _decide(a, b, rel: str):
    """Interval relation: True/False when every pair of points agrees, else None."""
    if rel in ("<", "<="):
        if a.b < b.a or (rel == "<=" and a.b <= b.a):
            return True
        if a.a > b.b or (rel == "<" and a.a >= b.b):
            return False
        return None
    if rel in (">", ">="):
        return _decide(b, a, "<" if rel == ">" else "<=")
    raise ValueError(rel)


def pi() -> RealApprox:
    return RealApprox(iv.pi)


def exp(x) -> RealApprox:
    return RealApprox(iv.exp(_to_iv(x)))


def sqrt(x) -> RealApprox:
    v = _to_iv(x)
    if v.a < 0:
        raise DomainError("sqrt of a possibly negative interval")
    return RealApprox(iv.sqrt(v))


def log(x) -> RealApprox:
    """Natural log; DomainError unless x is certainly positive."""
    if isinstance(x, (int, Fraction)) and x <= 0:
        raise DomainError(f"log of nonpositive {x}")
    v = _to_iv(x)
    if not v.a > 0:
        raise DomainError("log of an interval not certainly positive")
    return RealApprox(iv.log(v))


def log_plus(x) -> RealApprox:
    """max(log x, 0), with log_plus(0) = 0."""
    if isinstance(x, (int, Fraction)) and x == 0:
        return RealApprox.of(0)
    v = _to_iv(x)
    if v.a < 0:
        raise DomainError("log_plus of a negative argument")
    if v.b <= 1:
        return RealApprox.of(0)
    top = iv.log(iv.mpf(v.b)).b
    if v.a >= 1:
        return RealApprox(iv.log(v))
    return RealApprox(iv.mpf([0, top]))


def log_minus(x) -> RealApprox:
    """min(log x, 0) for x > 0."""
    v = _to_iv(x)
    if not v.a > 0:
        raise DomainError("log_minus needs a positive argument")
    if v.a >= 1:
        return RealApprox.of(0)
    bottom = iv.log(iv.mpf(v.a)).a
    if v.b <= 1:
        return RealApprox(iv.log(v))
    return RealApprox(iv.mpf([bottom, 0]))


def log_star(x) -> RealApprox:
    """max(log x, 1) for x > 0."""
    v = _to_iv(x)
    if not v.a > 0:
        raise DomainError("log_star needs a positive argument")
    e = iv.e
    if v.b <= e.a:
        return RealApprox.of(1)
    if v.a >= e.b:
        return RealApprox(iv.log(v))
    return RealApprox(iv.mpf([1, iv.log(iv.mpf(v.b)).b]))


def log_log(x) -> RealApprox:
    """log log x for x > e."""
    inner = log(x)
    return log(inner)


@dataclass(frozen=True)
class Comparison:
    """Outcome of a certified comparison ``lhs rel rhs``.

    ``holds`` is None only when the precision ceiling was hit.  ``margin`` is
    the slack in the direction of the relation (positive when it holds).
    """

    holds: bool | None
    lhs: RealApprox
    rhs: RealApprox
    relation: str
    precision: int

    @property
    def margin(self) -> RealApprox:
        if self.relation in ("<", "<="):
            return self.rhs - self.lhs
        return self.lhs - self.rhs


_RELATIONS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


def set_precision_ceiling(bits: int) -> None:
    """Process-wide ceiling for the precision doubling in ``certify``."""
    global PRECISION_CEILING
    if bits < DEFAULT_PRECISION:
        raise ValueError(f"ceiling must be at least {DEFAULT_PRECISION} bits")
    PRECISION_CEILING = bits


def certify(
    build: Callable[[], tuple],
    relation: str = "<=",
    start: int = DEFAULT_PRECISION,
    ceiling: int | None = None,
    strict: bool = False,
) -> Comparison:
    """Evaluate ``build()`` -> (lhs, rhs) at increasing precision until decided.

    With ``strict=True`` an undecided comparison raises Undecidable instead of
    returning ``holds=None``.
    """
    if relation not in _RELATIONS:
        raise ValueError(relation)
    ceiling = PRECISION_CEILING if ceiling is None else ceiling
    bits = start
    while True:
        with precision(bits):
            lhs, rhs = build()
            lhs, rhs = RealApprox.of(lhs), RealApprox.of(rhs)
            verdict = _decide(lhs.iv, rhs.iv, relation)
        if verdict is not None or bits >= ceiling:
            break
        bits *= 2
    if verdict is None and strict:
        raise Undecidable(f"comparison {relation} undecided at {bits} bits")
    return Comparison(verdict, lhs, rhs, relation, bits)


def certify_equal(build: Callable[[], tuple], tolerance: float = 1e-9) -> Comparison:
    """Check that two enclosures of the same quantity agree.

    Holds iff the intervals overlap and their hull is narrower than
    ``tolerance``; precision is doubled while the hull is too wide.
    """
    bits = DEFAULT_PRECISION
    while True:
        with precision(bits):
            lhs, rhs = build()
            lhs, rhs = RealApprox.of(lhs), RealApprox.of(rhs)
            overlap = lhs.overlaps(rhs)
            hull_width = float(max(lhs.hi, rhs.hi) - min(lhs.lo, rhs.lo))
        if not overlap:
            return Comparison(False, lhs, rhs, "==", bits)
        if hull_width < tolerance:
            return Comparison(True, lhs, rhs, "==", bits)
        if bits >= PRECISION_CEILING:
            return Comparison(None, lhs, rhs, "==", bits)
        bits *= 2
