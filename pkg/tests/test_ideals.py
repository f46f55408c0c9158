from __future__ import annotations

import pytest
from hypothesis import assume, given, settings, strategies as st

from quadlucas.arith import primes_below, valuation as vp
from quadlucas.errors import DomainError, NotAUnit
from quadlucas.field import QuadraticField, parse_element
from quadlucas.ideals import (
    Primitivity,
    Splitting,
    classify_by_definition,
    classify_primitivity,
    kronecker,
    residue_order,
    split_prime,
    support_primes,
    valuation,
    valuation_record,
)

FIELDS = [QuadraticField(m) for m in (2, 5, -1, -2, -7, 3, -15)]
PRIMES = primes_below(60)


def roots_by_scan(K, p):
    _, b, c = K.omega_minpoly()
    return [t for t in range(p) if (t * t + b * t + c) % p == 0]


def oracle_valuation(x, P):
    """Strip the largest power of p from the numerator, then test the
    cofactor against P by its image in O_K / P."""
    U, V, d = x.integral_form
    p, K = P.p, x.field
    if K.degree == 1:
        return (vp(U, p) if U else 0) - vp(d, p)
    s = min(vp(U, p) if U else 10**9, vp(V, p) if V else 10**9)
    U1, V1 = U // p**s, V // p**s
    _, b, c = K.omega_minpoly()
    N1 = U1 * U1 - b * U1 * V1 + c * V1 * V1
    rest = vp(N1, p)
    if P.splitting is Splitting.INERT:
        top = s
    elif P.splitting is Splitting.RAMIFIED:
        top = 2 * s + rest
    else:
        top = s + (rest if (U1 + V1 * P.root) % p == 0 else 0)
    return top - P.e * vp(d, p)


@st.composite
def elements(draw, K=None):
    K = K or draw(st.sampled_from(FIELDS))
    a = draw(st.integers(-10**6, 10**6))
    b = draw(st.integers(-10**6, 10**6))
    c = draw(st.sampled_from([1, 2, 3, 4, 6, 12, 25, 49]))
    assume(a or b)
    return K.element(a, b, c)


def test_splitting_types():
    K = QuadraticField(-7)
    assert [P.splitting for P in split_prime(K, 2)] == [Splitting.SPLIT] * 2
    assert split_prime(K, 7)[0].splitting is Splitting.RAMIFIED
    assert split_prime(K, 3)[0].splitting is Splitting.INERT
    assert split_prime(QuadraticField(2), 7)[0].name == "7:3"
    with pytest.raises(DomainError):
        split_prime(K, 9)


@pytest.mark.parametrize("K", FIELDS, ids=str)
def test_split_prime_agrees_with_root_scan(K):
    for p in primes_below(400):
        Ps = split_prime(K, p)
        roots = roots_by_scan(K, p)
        if len(roots) == 0:
            assert [P.splitting for P in Ps] == [Splitting.INERT]
        elif len(roots) == 1:
            assert [P.splitting for P in Ps] == [Splitting.RAMIFIED]
            assert K.discriminant % p == 0
        else:
            assert sorted(P.root for P in Ps) == roots
        assert kronecker(K.discriminant, p) == {0: -1, 1: 0, 2: 1}[len(roots)]


@given(elements())
@settings(max_examples=400, deadline=None)
def test_valuation_matches_oracle(x):
    for p in PRIMES:
        for P in split_prime(x.field, p):
            assert valuation(x, P) == oracle_valuation(x, P)


@given(elements())
@settings(max_examples=200, deadline=None)
def test_norm_valuation_balance(x):
    N = x.norm()
    for p in PRIMES:
        lhs = sum(P.f * valuation(x, P) for P in split_prime(x.field, p))
        rhs = (vp(N.numerator, p) if N.numerator % p == 0 else 0) - (vp(N.denominator, p) if N.denominator % p == 0 else 0)
        assert lhs == rhs


@given(st.sampled_from(FIELDS).flatmap(lambda K: st.tuples(elements(K), elements(K))))
@settings(max_examples=200, deadline=None)
def test_valuation_is_additive(xy):
    x, y = xy
    for p in PRIMES[:8]:
        for P in split_prime(x.field, p):
            assert valuation(x * y, P) == valuation(x, P) + valuation(y, P)


def test_high_power_split_valuation():
    K = QuadraticField(-1)
    P = next(P for P in split_prime(K, 5) if P.root == 2)
    x = K.element(2, 1) ** 7 * K.element(2, -1) ** 3
    vals = {Q.root: valuation(x, Q) for Q in split_prime(K, 5)}
    assert sorted(vals.values()) == [3, 7]
    assert valuation(x, P) == oracle_valuation(x, P)


def test_valuation_record(gamma):
    rec = valuation_record(gamma)
    assert rec.complete and rec.norm_check()
    for P, v in rec.entries:
        assert v == valuation(gamma, P) != 0
    assert {P for P, _ in rec.entries} == set(support_primes(gamma))


def test_residue_order_divides_group_order(gamma):
    for p in primes_below(300):
        for P in split_prime(gamma.field, p):
            if valuation(gamma, P):
                continue
            k = residue_order(gamma, P)
            assert (P.norm - 1) % k == 0
            if k <= 200:
                assert classify_by_definition(gamma, k, P) is Primitivity.PRIMITIVE


def test_classify_matches_definition_small_grid(gamma):
    for p in primes_below(200):
        for P in split_prime(gamma.field, p):
            if valuation(gamma, P):
                continue
            for n in range(1, 41):
                assert classify_primitivity(gamma, n, P).verdict is classify_by_definition(gamma, n, P)


def test_classify_examples():
    g = parse_element("1+1*sqrt(2)")
    (P7a, P7b) = split_prime(g.field, 7)
    verdicts = {P.name: classify_primitivity(g, 3, P).verdict for P in (P7a, P7b)}
    assert sorted(verdicts.values()) == [Primitivity.NOT_A_DIVISOR, Primitivity.PRIMITIVE]
    assert classify_primitivity(g, 6, P7a if verdicts[P7a.name] is Primitivity.PRIMITIVE else P7b).verdict is Primitivity.NON_PRIMITIVE
    h = parse_element("3+1*sqrt(7)")
    with pytest.raises(NotAUnit):
        classify_primitivity(h, 3, split_prime(h.field, 2)[0])
    with pytest.raises(DomainError):
        classify_primitivity(g, 0, P7a)
