"""Exact arithmetic in Q and in quadratic fields Q(sqrt(m)).

Elements are stored as ``(a + b*sqrt(m)) / c`` with integers a, b and
c > 0, gcd(a, b, c) = 1.  The field with ``m == 1`` is Q itself (degree 1).
Norms are always taken relative to the ambient field, so a rational q inside
a quadratic field has norm q**2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import intervals as ia
from .arith import factor
from .errors import ParseError, ReducibleInput, ZeroElement


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n = s**2 * m with m squarefree (sign kept on m)."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    s, m = 1, (1 if n > 0 else -1)
    for p, e in factor(abs(n)).factors:
        s *= p ** (e // 2)
        if e % 2:
            m *= p
    return s, m


@dataclass(frozen=True)
class QuadraticField:
    """K = Q(sqrt(m)); ``m == 1`` encodes K = Q."""

    m: int

    def __post_init__(self):
        if self.m == 0:
            raise ValueError("m must be nonzero")
        if self.m != 1 and squarefree_decompose(self.m) != (1, self.m):
            raise ValueError(f"m = {self.m} is not squarefree")

    @property
    def degree(self) -> int:
        return 1 if self.m == 1 else 2

    @property
    def discriminant(self) -> int:
        if self.m == 1:
            return 1
        return self.m if self.m % 4 == 1 else 4 * self.m

    @property
    def omega_half(self) -> bool:
        """True when the integral basis is {1, (1+sqrt(m))/2}."""
        return self.m != 1 and self.m % 4 == 1

    @property
    def is_real(self) -> bool:
        return self.m > 0

    def omega_minpoly(self) -> tuple[int, int, int]:
        """Monic minimal polynomial (1, b, c) of the integral basis element."""
        if self.omega_half:
            return (1, -1, (1 - self.m) // 4)
        return (1, 0, -self.m)

    def element(self, a, b=0, c=1) -> "FieldElement":
        return FieldElement.make(self, a, b, c)

    def rational(self, q) -> "FieldElement":
        q = Fraction(q)
        return FieldElement.make(self, q.numerator, 0, q.denominator)

    def omega(self) -> "FieldElement":
        if self.omega_half:
            return self.element(1, 1, 2)
        return self.element(0, 1, 1)

    def __str__(self):
        return "Q" if self.m == 1 else f"Q(sqrt({self.m}))"


RATIONALS = QuadraticField(1)


def _coerce(field: QuadraticField, other) -> "FieldElement":
    if isinstance(other, FieldElement):
        if other.field != field:
            if other.is_rational:
                return field.rational(other.rational_value)
            raise ValueError(f"cannot mix {field} and {other.field}")
        return other
    if isinstance(other, (int, Fraction)):
        return field.rational(other)
    return NotImplemented


@dataclass(frozen=True)
class FieldElement:
    field: QuadraticField
    a: int
    b: int
    c: int

    @classmethod
    def make(cls, field: QuadraticField, a: int, b: int = 0, c: int = 1) -> "FieldElement":
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if field.m == 1 and b:
            a, b = a + b, 0
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(a, b, c)
        if g > 1:
            a, b, c = a // g, b // g, c // g
        return cls(field, a, b, c)

    # coordinates x + y*sqrt(m)
    @property
    def x(self) -> Fraction:
        return Fraction(self.a, self.c)

    @property
    def y(self) -> Fraction:
        return Fraction(self.b, self.c)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def rational_value(self) -> Fraction:
        if self.b:
            raise ValueError("element is irrational")
        return Fraction(self.a, self.c)

    @property
    def degree(self) -> int:
        """Degree over Q of the element itself (1 or 2)."""
        return 1 if self.b == 0 else 2

    def _wrap(self, a, b, c):
        return FieldElement.make(self.field, a, b, c)

    def __add__(self, other):
        o = _coerce(self.field, other)
        if o is NotImplemented:
            return o
        return self._wrap(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b, self.c)

    def __sub__(self, other):
        o = _coerce(self.field, other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce(self.field, other)
        if o is NotImplemented:
            return o
        m = self.field.m
        return self._wrap(
            self.a * o.a + m * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.c * o.c,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        return FieldElement(self.field, self.a, -self.b, self.c)

    def norm(self) -> Fraction:
        """N_{K/Q}; equals q**2 for a rational q inside a quadratic field."""
        if self.field.degree == 1:
            return Fraction(self.a, self.c)
        return Fraction(self.a * self.a - self.field.m * self.b * self.b, self.c * self.c)

    def trace(self) -> Fraction:
        if self.field.degree == 1:
            return Fraction(self.a, self.c)
        return Fraction(2 * self.a, self.c)

    def inverse(self) -> "FieldElement":
        if self.is_zero:
            raise ZeroElement("inverse of zero")
        if self.field.degree == 1:
            return self._wrap(self.c, 0, self.a)
        # 1/x = conj(x) / N(x)
        n = self.a * self.a - self.field.m * self.b * self.b
        return self._wrap(self.a * self.c, -self.b * self.c, n)

    def __truediv__(self, other):
        o = _coerce(self.field, other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return _coerce(self.field, other) * self.inverse()

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and Fraction(self.a, self.c) == other
        if isinstance(other, FieldElement):
            return (self.field, self.a, self.b, self.c) == (other.field, other.a, other.b, other.c)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.m, self.a, self.b, self.c))

    @cached_property
    def minpoly(self) -> tuple[int, ...]:
        """Primitive integer minimal polynomial, leading coefficient > 0.

        ``(c, -a)`` for a rational a/c, ``(A, B, C)`` for A t^2 + B t + C.
        """
        if self.b == 0:
            return (self.c, -self.a)
        m = self.field.m
        A, B, C = self.c * self.c, -2 * self.a * self.c, self.a * self.a - m * self.b * self.b
        g = math.gcd(A, B, C)
        return (A // g, B // g, C // g)

    @property
    def leading_coefficient(self) -> int:
        return self.minpoly[0]

    @cached_property
    def integral_form(self) -> tuple[int, int, int]:
        """(U, V, d) with self = (U + V*omega) / d, d > 0 minimal."""
        if self.field.omega_half:
            U, V, d = self.a - self.b, 2 * self.b, self.c
        else:
            U, V, d = self.a, self.b, self.c
        g = math.gcd(U, V, d)
        return (U // g, V // g, d // g)

    @property
    def is_integral(self) -> bool:
        return self.integral_form[2] == 1

    @cached_property
    def integral_norm(self) -> int:
        """N(U + V*omega) for the integral numerator of :attr:`integral_form`."""
        U, V, _ = self.integral_form
        if self.field.degree == 1:
            return U
        if self.field.omega_half:
            # N(U + V w) = U^2 + U V + V^2 (1 - m)/4
            return U * U + U * V + V * V * ((1 - self.field.m) // 4)
        return U * U - self.field.m * V * V

    def is_root_of_unity(self) -> bool:
        if self.is_zero:
            raise ZeroElement("0 is not a unit")
        if self.norm() not in (1, -1):
            return False
        one = self.field.rational(1)
        return any(self**k == one for k in (1, 2, 3, 4, 6))

    # embeddings -------------------------------------------------------
    def log_abs_embeddings(self) -> list[ia.RealApprox]:
        """log|x^sigma| for each of the d complex embeddings of the field."""
        if self.is_zero:
            raise ZeroElement("log of zero")
        d = self.field.degree
        if self.b == 0:
            q = abs(Fraction(self.a, self.c))
            return [ia.log(q)] * d
        N = self.norm()
        if not self.field.is_real:
            half = ia.log(N) / 2
            return [half, half]
        # compute the embedding free of cancellation directly, the other as N / it
        sq = ia.sqrt(self.field.m)
        big_sign = 1 if self.a * self.b >= 0 else -1
        big = abs(ia.RealApprox.of(self.a) + big_sign * sq * self.b) / self.c
        log_big = ia.log(big)
        log_small = ia.log(abs(N)) - log_big
        return [log_big, log_small] if big_sign == 1 else [log_small, log_big]

    def abs_embeddings(self) -> list[ia.RealApprox]:
        return [ia.exp(v) for v in self.log_abs_embeddings()]

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"FieldElement({format_element(self)})"


def format_element(x: FieldElement) -> str:
    q, r = Fraction(x.a, x.c), Fraction(x.b, x.c)
    if r == 0:
        return str(q)
    sign = "+" if r > 0 else "-"
    return f"{q}{sign}{abs(r)}*sqrt({x.field.m})"


def element_from_minpoly(a: int, b: int, c: int, root_sign: int = 1, allow_rational: bool = True) -> FieldElement:
    """Root of a t^2 + b t + c.

    The primitive form with positive leading coefficient is used, and the root
    is (-b + root_sign*sqrt(b^2 - 4ac)) / 2a with the principal square root
    (positive real, or i times positive real).  A reducible polynomial yields
    the corresponding rational root in Q unless ``allow_rational`` is False.
    """
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    if root_sign not in (1, -1):
        raise ValueError("root_sign must be +1 or -1")
    g = math.gcd(a, b, c)
    a, b, c = a // g, b // g, c // g
    if a < 0:
        a, b, c = -a, -b, -c
    disc = b * b - 4 * a * c
    if disc >= 0 and math.isqrt(disc) ** 2 == disc:
        if not allow_rational:
            raise ReducibleInput(f"{a}t^2{b:+}t{c:+} splits over Q")
        root = Fraction(-b + root_sign * math.isqrt(disc), 2 * a)
        if root == 0:
            raise ZeroElement("selected root is 0")
        return RATIONALS.rational(root)
    s, m = squarefree_decompose(disc)
    K = QuadraticField(m)
    return K.element(-b, root_sign * s, 2 * a)


_RAT = r"\d+(?:/\d+)?"
_MINPOLY_RE = re.compile(r"^\(\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*\)\s*([+-])$")
_SURD_RE = re.compile(
    rf"^(?P<x>[+-]?\s*{_RAT})?\s*(?:(?P<sign>[+-])?\s*(?:(?P<y>{_RAT})\s*\*\s*)?sqrt\(\s*(?P<m>[+-]?\d+)\s*\))?$"
)


def parse_element(text: str) -> FieldElement:
    """Parse ``(a,b,c)+`` / ``(a,b,c)-`` or ``x+y*sqrt(m)`` literals."""
    s = text.strip()
    mm = _MINPOLY_RE.match(s)
    if mm:
        a, b, c = (int(mm.group(i)) for i in (1, 2, 3))
        if a == 0:
            raise ParseError(f"leading coefficient is zero in {text!r}")
        try:
            return element_from_minpoly(a, b, c, 1 if mm.group(4) == "+" else -1)
        except (ValueError, ZeroElement) as exc:
            raise ParseError(str(exc)) from exc
    ms = _SURD_RE.match(s)
    if not ms or not s or (ms.group("x") is None and ms.group("m") is None):
        raise ParseError(f"cannot parse element literal {text!r}")
    x = Fraction(ms.group("x").replace(" ", "")) if ms.group("x") else Fraction(0)
    if ms.group("m") is None:
        if x == 0:
            raise ParseError("zero element")
        return RATIONALS.rational(x)
    if ms.group("x") is not None and ms.group("sign") is None:
        raise ParseError(f"missing sign before sqrt in {text!r}")
    y = Fraction(ms.group("y")) if ms.group("y") else Fraction(1)
    if ms.group("sign") == "-":
        y = -y
    radicand = int(ms.group("m"))
    if radicand == 0:
        value = x
    else:
        sq, m = squarefree_decompose(radicand)
        y *= sq
        if m == 1:
            value = x + y
        else:
            K = QuadraticField(m)
            el = K.rational(x) + K.element(y.numerator, 0, y.denominator) * K.element(0, 1, 1)
            if el.is_zero:
                raise ParseError("zero element")
            return el
    if value == 0:
        raise ParseError("zero element")
    return RATIONALS.rational(value)
