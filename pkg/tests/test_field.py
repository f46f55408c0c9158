from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from quadlucas.errors import ParseError, ReducibleInput, ZeroElement
from quadlucas.field import (
    RATIONALS,
    QuadraticField,
    element_from_minpoly,
    parse_element,
    squarefree_decompose,
)

FIELDS = [QuadraticField(m) for m in (2, 3, 5, 7, 13, -1, -2, -3, -7, -15)]

small = st.integers(min_value=-50, max_value=50)


@st.composite
def elements(draw, field=None):
    K = field or draw(st.sampled_from(FIELDS))
    a, b = draw(small), draw(small)
    c = draw(st.integers(min_value=1, max_value=12))
    assume(a or b)
    return K.element(a, b, c)


@st.composite
def pairs(draw):
    K = draw(st.sampled_from(FIELDS))
    return draw(elements(K)), draw(elements(K))


def numeric(x, sign=1):
    """Complex value of the embedding sqrt(m) -> sign*sqrt(m), independent of the library."""
    root = mpmath.sqrt(mpmath.mpc(x.field.m)) * sign
    return (mpmath.mpf(x.a) + mpmath.mpf(x.b) * root) / x.c


@given(pairs())
def test_ring_laws(p):
    x, y = p
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) - y == x
    assert (x * y) / y == x
    assert x * (x + y) == x * x + x * y


@given(pairs())
def test_norm_and_trace(p):
    x, y = p
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x * x.conjugate() == x.field.rational(x.norm())


@given(elements())
def test_embeddings_match_numeric(x):
    mpmath.mp.dps = 40
    logs = x.log_abs_embeddings()
    for sign, approx in zip((1, -1), logs):
        ref = mpmath.log(abs(numeric(x, sign)))
        assert approx.lo - mpmath.mpf(10) ** -30 <= ref <= approx.hi + mpmath.mpf(10) ** -30
    mpmath.mp.dps = 15


@given(elements())
def test_minpoly_annihilates(x):
    coeffs = x.minpoly
    assert coeffs[0] > 0
    acc = x.field.rational(0)
    for c in coeffs:
        acc = acc * x + c
    assert acc.is_zero


@given(elements(), st.integers(min_value=0, max_value=12))
def test_power_matches_repeated_product(x, n):
    acc = x.field.rational(1)
    for _ in range(n):
        acc = acc * x
    assert x**n == acc
    assert x ** (-n) * acc == x.field.rational(1)


@given(elements())
def test_integral_form_round_trip(x):
    U, V, d = x.integral_form
    assert d > 0
    assert (x.field.rational(U) + x.field.omega() * V) / d == x
    assert x.is_integral == (d == 1)
    # integral norm is the norm of the numerator
    assert Fraction(x.integral_norm, d * d) == x.norm()


@given(st.integers(min_value=-(10**6), max_value=10**6).filter(bool))
def test_squarefree_decompose(n):
    s, m = squarefree_decompose(n)
    assert s * s * m == n
    assert all(m % (q * q) for q in range(2, 1000))


def test_field_invariants():
    assert QuadraticField(5).discriminant == 5
    assert QuadraticField(2).discriminant == 8
    assert QuadraticField(-1).discriminant == -4
    assert QuadraticField(-7).omega() == QuadraticField(-7).element(1, 1, 2)
    assert RATIONALS.degree == 1
    with pytest.raises(ValueError):
        QuadraticField(8)
    with pytest.raises(ValueError):
        QuadraticField(0)


def test_mixing_fields_rejected():
    with pytest.raises(ValueError):
        QuadraticField(2).element(0, 1) + QuadraticField(3).element(0, 1)
    # rationals coerce into any field
    assert QuadraticField(2).element(1, 1) + RATIONALS.rational(1) == QuadraticField(2).element(2, 1)


@pytest.mark.parametrize(
    "text,m,coords",
    [
        ("1+1*sqrt(2)", 2, (1, 1, 1)),
        ("1+sqrt(2)", 2, (1, 1, 1)),
        ("1/3-2/3*sqrt(-2)", -2, (1, -2, 3)),
        ("3*sqrt(8)", 2, (0, 6, 1)),
        ("2+1*sqrt(9)", 1, (5, 0, 1)),
        ("(1,-1,-1)+", 5, (1, 1, 2)),
        ("(1,-1,-1)-", 5, (1, -1, 2)),
        ("(2,-3,2)+", -7, (3, 1, 4)),
        ("(1,-3,2)+", 1, (2, 0, 1)),
        ("(1,-3,2)-", 1, (1, 0, 1)),
        ("3/2", 1, (3, 0, 2)),
        ("-5", 1, (-5, 0, 1)),
    ],
)
def test_parse(text, m, coords):
    x = parse_element(text)
    assert x.field.m == m
    assert (x.a, x.b, x.c) == coords


@pytest.mark.parametrize("text", ["", "0", "sqrt(x)", "1+*sqrt(2)", "1 1*sqrt(2)", "(0,1,1)+", "(1,2,3)", "1-1*sqrt(1)", "2*sqrt(0)"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_element(text)


def test_minpoly_root_choice():
    x = element_from_minpoly(1, -2, -1, 1)
    assert x == QuadraticField(2).element(1, 1)
    assert element_from_minpoly(-2, 4, 2, -1) == QuadraticField(2).element(1, -1)
    with pytest.raises(ReducibleInput):
        element_from_minpoly(1, -3, 2, 1, allow_rational=False)
    with pytest.raises(ZeroElement):
        element_from_minpoly(1, -1, 0, -1)


@pytest.mark.parametrize(
    "text,expected",
    [("(1,0,1)+", True), ("(1,-1,1)+", True), ("(1,1,1)-", True), ("-1", True), ("1", True), ("1+1*sqrt(2)", False), ("(2,-3,2)+", False), ("1+1*sqrt(-1)", False)],
)
def test_root_of_unity(text, expected):
    assert parse_element(text).is_root_of_unity() is expected


def test_formatting_round_trip(gamma):
    assert parse_element(str(gamma)) == gamma
